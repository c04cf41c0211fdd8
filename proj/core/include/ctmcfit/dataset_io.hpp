#pragma once

#include <filesystem>
#include <iosfwd>

#include "ctmcfit/observations.hpp"

namespace ctmcfit {

/// Line-delimited JSON dataset.
///
///   {"kind":"timed","observables":["sc","ph"]}
///   {"labels":[[0,1],[1,1]],"times":[0.51869282545720072]}
///
/// The first line is the header; each following nonempty line is one
/// sequence. Times are written with 17 significant digits so load(save(d)) == d
/// bit for bit. Untimed records carry no "times" field.
void write_dataset(std::ostream& out, const Dataset& dataset);
Dataset read_dataset(std::istream& in);

void save(const Dataset& dataset, const std::filesystem::path& path);
Dataset load(const std::filesystem::path& path);

}  // namespace ctmcfit
