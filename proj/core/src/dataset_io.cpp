#include "ctmcfit/dataset_io.hpp"

#include <cmath>
#include <cstdio>
#include <optional>
#include <fstream>
#include <sstream>
#include <string>

#include "ctmcfit/errors.hpp"
#include "json.hpp"

namespace ctmcfit {

namespace {

using nlohmann::json;

void write_labels(std::ostream& out, const std::vector<Label>& labels) {
  out << "[";
  for (std::size_t t = 0; t < labels.size(); ++t) {
    if (t) out << ",";
    out << "[";
    for (std::size_t j = 0; j < labels[t].size(); ++j) {
      if (j) out << ",";
      out << labels[t][j];
    }
    out << "]";
  }
  out << "]";
}

std::string format_time(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::vector<Label> parse_labels(const json& record, std::size_t arity, std::size_t line) {
  auto it = record.find("labels");
  if (it == record.end() || !it->is_array()) throw DatasetFormatError("record needs a \"labels\" array", line);
  if (it->empty()) throw DatasetFormatError("\"labels\" must be nonempty", line);
  std::vector<Label> labels;
  labels.reserve(it->size());
  for (const auto& entry : *it) {
    if (!entry.is_array()) throw DatasetFormatError("each label must be an array of integers", line);
    Label label;
    for (const auto& v : entry) {
      if (!v.is_number_integer()) throw DatasetFormatError("label values must be integers", line);
      label.push_back(v.get<std::int64_t>());
    }
    if (arity != 0 && label.size() != arity)
      throw DatasetFormatError("label arity does not match the observables header", line);
    labels.push_back(std::move(label));
  }
  return labels;
}

}  // namespace

void write_dataset(std::ostream& out, const Dataset& dataset) {
  out << "{\"kind\":\"" << to_string(dataset.kind()) << "\",\"observables\":[";
  for (std::size_t i = 0; i < dataset.observables().size(); ++i) {
    if (i) out << ",";
    out << json(dataset.observables()[i]).dump();
  }
  out << "]}\n";
  if (dataset.kind() == ObservationKind::Timed) {
    for (const auto& o : dataset.timed()) {
      out << "{\"labels\":";
      write_labels(out, o.labels);
      out << ",\"times\":[";
      for (std::size_t t = 0; t < o.dwells.size(); ++t) {
        if (t) out << ",";
        out << format_time(o.dwells[t]);
      }
      out << "]}\n";
    }
  } else {
    for (const auto& o : dataset.untimed()) {
      out << "{\"labels\":";
      write_labels(out, o.labels);
      out << "}\n";
    }
  }
}

Dataset read_dataset(std::istream& in) {
  std::string text;
  std::size_t line_no = 0;
  std::optional<ObservationKind> kind;
  std::vector<std::string> observables;
  std::vector<TimedObservation> timed;
  std::vector<UntimedObservation> untimed;

  while (std::getline(in, text)) {
    ++line_no;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    json record;
    try {
      record = json::parse(text);
    } catch (const json::parse_error& e) {
      throw DatasetFormatError(std::string("invalid JSON: ") + e.what(), line_no);
    }
    if (!record.is_object()) throw DatasetFormatError("record must be a JSON object", line_no);

    if (!kind) {
      auto k = record.find("kind");
      if (k == record.end() || !k->is_string()) throw DatasetFormatError("header needs a \"kind\" string", line_no);
      if (*k == "timed") {
        kind = ObservationKind::Timed;
      } else if (*k == "untimed") {
        kind = ObservationKind::Untimed;
      } else {
        throw DatasetFormatError("unknown kind '" + k->get<std::string>() + "'", line_no);
      }
      if (auto obs = record.find("observables"); obs != record.end()) {
        if (!obs->is_array()) throw DatasetFormatError("\"observables\" must be an array", line_no);
        for (const auto& n : *obs) {
          if (!n.is_string()) throw DatasetFormatError("observable names must be strings", line_no);
          observables.push_back(n.get<std::string>());
        }
      }
      continue;
    }

    auto labels = parse_labels(record, observables.size(), line_no);
    auto times = record.find("times");
    if (*kind == ObservationKind::Untimed) {
      if (times != record.end()) throw DatasetFormatError("untimed dataset record carries \"times\"", line_no);
      untimed.push_back(UntimedObservation{std::move(labels)});
      continue;
    }
    if (times == record.end() || !times->is_array())
      throw DatasetFormatError("timed record needs a \"times\" array", line_no);
    if (times->size() + 1 != labels.size())
      throw DatasetFormatError("\"times\" must have exactly one entry fewer than \"labels\"", line_no);
    TimedObservation o{std::move(labels), {}};
    o.dwells.reserve(times->size());
    for (const auto& v : *times) {
      if (!v.is_number()) throw DatasetFormatError("times must be numbers", line_no);
      const double d = v.get<double>();
      if (!(d > 0.0) || !std::isfinite(d)) throw DatasetFormatError("times must be positive", line_no);
      o.dwells.push_back(d);
    }
    timed.push_back(std::move(o));
  }

  if (!kind) throw DatasetFormatError("missing header record", line_no);
  if (*kind == ObservationKind::Timed) {
    if (timed.empty()) throw DatasetFormatError("dataset has no observations", line_no);
    return Dataset(std::move(timed), std::move(observables));
  }
  if (untimed.empty()) throw DatasetFormatError("dataset has no observations", line_no);
  return Dataset(std::move(untimed), std::move(observables));
}

void save(const Dataset& dataset, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  write_dataset(out, dataset);
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

Dataset load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  return read_dataset(in);
}

}  // namespace ctmcfit
