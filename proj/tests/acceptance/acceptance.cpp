// Acceptance suite: one PASS/FAIL line per criterion.
//
// Usage: ctmcfit_acceptance [criterion ...]   (default: all)

#include <chrono>
#include <cstdarg>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "app/builtin_models.hpp"
#include "app/experiments.hpp"
#include "app/report.hpp"
#include "ctmcfit/estimation.hpp"
#include "ctmcfit/forward_backward.hpp"
#include "ctmcfit/prism/builder.hpp"
#include "ctmcfit/prism/elaborate.hpp"
#include "ctmcfit/prism/parser.hpp"
#include "oracle.hpp"

using namespace ctmcfit;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* format, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* format, ...) {
  char buf[512];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof buf, format, args);
  va_end(args);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// Distance between a log-likelihood and the log of a brute-force likelihood.
double log_gap(double loglik, double brute) {
  if (brute == 0.0) return std::isinf(loglik) && loglik < 0 ? 0.0 : INFINITY;
  if (!std::isfinite(loglik)) return INFINITY;
  // Relative error of the likelihood itself, which bounds the relative error of its log.
  return std::abs(std::expm1(loglik - std::log(brute)));
}

Outcome oracle_equivalence() {
  const auto start = std::chrono::steady_clock::now();
  Rng rng(101);
  double worst = 0.0;
  std::size_t sequences = 0, impossible = 0;
  for (int model = 0; model < 100; ++model) {
    const auto m = testing::random_model(rng);
    const auto v = testing::random_valuation(rng, m.params().size());
    const auto c = instantiate(m, v);
    auto seqs = testing::random_sequences(m, v, 3, 5, rng);
    // One sequence with arbitrary labels, usually impossible.
    TimedObservation noise;
    const std::size_t k = 1 + static_cast<std::size_t>(rng.uniform() * 5);
    for (std::size_t t = 0; t <= k; ++t) noise.labels.push_back({static_cast<std::int64_t>(rng.uniform() * 3)});
    for (std::size_t t = 0; t < k; ++t) noise.dwells.push_back(rng.uniform(0.05, 2.0));
    seqs.push_back(noise);
    for (const auto& o : seqs) {
      const auto u = strip_times(o);
      const double bt = testing::brute_force_likelihood(m, v, o);
      const double bu = testing::brute_force_likelihood(m, v, u);
      impossible += bt == 0.0;
      worst = std::max(worst, log_gap(forward_backward(c, o).loglik, bt));
      worst = std::max(worst, log_gap(forward_backward(c, u).loglik, bu));
      ++sequences;
    }
  }
  const double elapsed = seconds_since(start);
  return {worst <= 1e-9 && elapsed < 30.0,
          fmt("100 models, %zu sequences (%zu impossible), max relative error %.3g, %.2f s", sequences, impossible,
              worst, elapsed)};
}

struct Triple {
  ParametricCtmc model;
  Dataset data;
  Valuation init;
};

Triple random_triple(Rng& rng) {
  auto m = testing::random_model(rng);
  const auto truth = testing::random_valuation(rng, m.params().size());
  const std::size_t count = 2 + static_cast<std::size_t>(rng.uniform() * 4);
  Dataset data(testing::random_sequences(m, truth, count, 5, rng));
  auto init = testing::random_valuation(rng, m.params().size(), 0.1, 5.0);
  return {std::move(m), std::move(data), std::move(init)};
}

Outcome monotone_likelihood() {
  const auto start = std::chrono::steady_clock::now();
  Rng rng(202);
  std::size_t violations = 0;
  double worst_drop = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const auto t = random_triple(rng);
    for (const Dataset& d : {t.data, t.data.without_times()}) {
      Valuation v = t.init;
      double previous = -INFINITY;
      for (int iter = 0; iter <= 15; ++iter) {
        const auto acc = accumulate(t.model, v, d);
        if (iter > 0) {
          const double drop = previous - acc.loglik;
          const double rel = drop / std::max(1.0, std::abs(previous));
          worst_drop = std::max(worst_drop, rel);
          if (rel > 1e-8) ++violations;
        }
        previous = acc.loglik;
        if (iter == 15) break;
        v = d.kind() == ObservationKind::Timed ? mm_step_timed(t.model, v, acc, {}).valuation
                                               : mm_step_untimed(t.model, v, acc, {}).valuation;
      }
    }
  }
  const double elapsed = seconds_since(start);
  return {violations == 0 && elapsed < 120.0,
          fmt("50 triples x 2 estimators x 15 iterations, %zu violations, worst relative drop %.3g, %.2f s",
              violations, worst_drop, elapsed)};
}

Outcome minorization_gap() {
  Rng rng(303);
  std::size_t violations = 0;
  double worst = INFINITY;
  for (int trial = 0; trial < 50; ++trial) {
    const auto t = random_triple(rng);
    const auto vm = testing::random_valuation(rng, t.model.params().size(), 0.1, 5.0);
    const auto v = testing::random_valuation(rng, t.model.params().size(), 0.1, 5.0);
    for (const Dataset& d : {t.data, t.data.without_times()}) {
      const auto acc = accumulate(t.model, vm, d);
      const double gain = accumulate(t.model, v, d).loglik - acc.loglik;
      const double bound = surrogate(t.model, vm, acc, v) - surrogate(t.model, vm, acc, vm);
      const double slack = gain - bound;
      worst = std::min(worst, slack);
      if (slack < -1e-9) ++violations;
    }
  }
  return {violations == 0, fmt("50 pairs x {g, h}, %zu violations, smallest gap %.3g", violations, worst)};
}

using EdgeMap = std::map<std::pair<prism::StateVector, prism::StateVector>, RateExpr>;

EdgeMap edge_map(const prism::BuiltModel& m) {
  EdgeMap out;
  const std::size_t arity = m.chain.params().size();
  for (const auto& t : m.chain.transitions()) {
    auto it = out.try_emplace({m.states[t.source], m.states[t.target]}, RateExpr(arity)).first;
    it->second = it->second + RateExpr::from_terms(arity, {t.rate});
  }
  return out;
}

bool same_rates(const RateExpr& a, const RateExpr& b) {
  if (a.terms().size() != b.terms().size()) return false;
  for (std::size_t k = 0; k < a.terms().size(); ++k)
    if (a.terms()[k].exponents != b.terms()[k].exponents ||
        testing::relative_difference(a.terms()[k].coeff, b.terms()[k].coeff) > 1e-12)
      return false;
  return true;
}

std::map<prism::StateVector, RateExpr> grouped(const prism::Explorer& ex, const prism::StateVector& s) {
  std::map<prism::StateVector, RateExpr> out;
  for (auto& [target, rate] : ex.symbolic_successors(s)) {
    auto it = out.try_emplace(target, RateExpr(rate.arity())).first;
    it->second = it->second + rate;
  }
  return out;
}

Outcome composition_fidelity() {
  std::vector<std::string> notes;
  bool ok = true;
  // Whole reachable graphs at populations small enough to enumerate.
  for (double scale : {0.001, 0.003}) {
    const auto pop = app::SirPopulation::scaled(scale);
    const auto left = prism::compile(app::sir_source(pop, false), {}, {"i"});
    const auto right = prism::compile(app::sir_source(pop, true), {}, {"i"});
    const auto l = edge_map(left), r = edge_map(right);
    bool iso = left.states.size() == right.states.size() && l.size() == r.size() &&
               left.chain.params().names() == right.chain.params().names();
    for (const auto& [key, rate] : l) {
      if (!iso) break;
      const auto it = r.find(key);
      iso = it != r.end() && same_rates(rate, it->second);
    }
    ok = ok && iso;
    notes.push_back(fmt("SIZE=%lld %zu states %s", static_cast<long long>(pop.size), left.states.size(),
                        iso ? "isomorphic" : "DIFFER"));
  }
  // Full-size models: successor relations agree along random walks from the initial state.
  {
    const auto la = prism::parse(*app::builtin_model("sir"));
    const auto ra = prism::parse(*app::builtin_model("sir_modular"));
    const prism::Explorer lex(la, prism::elaborate(la), {"i"});
    const prism::Explorer rex(ra, prism::elaborate(ra), {"i"});
    bool agree = lex.initial_state() == rex.initial_state();
    Rng rng(404);
    std::size_t visited = 0;
    for (int walk = 0; walk < 20 && agree; ++walk) {
      auto s = lex.initial_state();
      for (int step = 0; step < 500 && agree; ++step) {
        const auto a = grouped(lex, s), b = grouped(rex, s);
        agree = a.size() == b.size() && lex.label(s) == rex.label(s);
        for (auto ia = a.begin(), ib = b.begin(); agree && ia != a.end(); ++ia, ++ib)
          agree = ia->first == ib->first && same_rates(ia->second, ib->second);
        ++visited;
        if (a.empty()) break;
        auto it = a.begin();
        std::advance(it, static_cast<long>(rng.uniform() * static_cast<double>(a.size())));
        s = it->first;
      }
    }
    ok = ok && agree;
    notes.push_back(fmt("SIZE=100000 %zu states on random walks %s", visited, agree ? "agree" : "DIFFER"));
  }
  const auto tandem = prism::compile(*app::builtin_model("tandem"), {{"c", 4}}, {"sc", "ph"});
  const bool counts = tandem.states.size() == 45 && tandem.chain.transition_count() == 123;
  ok = ok && counts;
  std::string detail;
  for (const auto& n : notes) detail += n + "; ";
  detail += fmt("tandem c=4: %zu states, %zu transitions", tandem.states.size(), tandem.chain.transition_count());
  return {ok, detail};
}

app::TandemExperiment tandem_protocol(ObservationKind mode) {
  app::TandemExperiment e;
  e.mode = mode;
  return e;
}

Outcome tandem_timed() {
  const auto start = std::chrono::steady_clock::now();
  const auto out = app::run_tandem(tandem_protocol(ObservationKind::Timed));
  const double elapsed = seconds_since(start);
  const auto& s = out.stats;
  const bool pass = s.median_linf <= 0.3 && s.median_l1 <= 0.5 && s.all_converged && s.max_iterations <= 20 &&
                    elapsed <= 60.0;
  return {pass, fmt("median linf %.4f, median l1 %.4f, all converged %s, max iterations %zu, %.2f s", s.median_linf,
                    s.median_l1, s.all_converged ? "yes" : "no", s.max_iterations, elapsed)};
}

Outcome tandem_untimed() {
  const auto start = std::chrono::steady_clock::now();
  const auto out = app::run_tandem(tandem_protocol(ObservationKind::Untimed));
  const double elapsed = seconds_since(start);
  const auto& s = out.stats;
  const bool pass = s.median_linf <= 0.4 && s.monotone && elapsed <= 120.0;
  return {pass, fmt("median linf %.4f, median l1 %.4f, monotone %s, max iterations %zu, %.2f s", s.median_linf,
                    s.median_l1, s.monotone ? "yes" : "no", s.max_iterations, elapsed)};
}

Outcome sir_pipeline() {
  const auto start = std::chrono::steady_clock::now();
  app::SirCase config;
  const auto out = app::run_sir_case(config);
  const double db = std::abs(out.beta - config.beta);
  const double dg = std::abs(out.gamma - config.gamma);
  const double dp = std::abs(out.plock - config.plock);
  const bool pass = dg <= 0.02 && db <= 0.05 && dp <= 0.07;
  return {pass, fmt("SIZE=1000: |dbeta| %.4f, |dgamma| %.4f, |dplock| %.4f, %.2f s", db, dg, dp,
                    seconds_since(start))};
}

Outcome closed_form_consistency() {
  Rng rng(808);
  testing::RandomModelShape shape;
  shape.uniform_degree = true;
  double worst = 0.0;
  std::size_t updates = 0;
  bool labelled = true;
  for (int trial = 0; trial < 30; ++trial) {
    const auto m = testing::random_model(rng, shape);
    const auto truth = testing::random_valuation(rng, m.params().size());
    const Dataset timed(testing::random_sequences(m, truth, 4, 5, rng));
    const auto init = testing::random_valuation(rng, m.params().size(), 0.1, 5.0);
    for (const Dataset& d : {timed, timed.without_times()}) {
      UpdateOptions closed, root;
      root.rule = UpdateRule::RootSolver;
      Valuation a = init, b = init;
      for (int iter = 0; iter < 10; ++iter) {
        const auto acc_a = accumulate(m, a, d);
        const auto acc_b = accumulate(m, b, d);
        const bool is_timed = d.kind() == ObservationKind::Timed;
        const auto sa = is_timed ? mm_step_timed(m, a, acc_a, {}, closed) : mm_step_untimed(m, a, acc_a, {}, closed);
        const auto sb = is_timed ? mm_step_timed(m, b, acc_b, {}, root) : mm_step_untimed(m, b, acc_b, {}, root);
        for (std::size_t i = 0; i < a.size(); ++i) {
          labelled = labelled && (sa.updates[i] != ParamUpdate::RootSolved) &&
                     (sb.updates[i] != ParamUpdate::ClosedForm);
          worst = std::max(worst, testing::relative_difference(sa.valuation[i], sb.valuation[i]));
          ++updates;
        }
        a = sa.valuation;
        b = sb.valuation;
      }
    }
  }
  return {worst <= 1e-10 && labelled,
          fmt("30 models x 2 estimators x 10 iterations, %zu updates, max relative difference %.3g", updates, worst)};
}

Outcome determinism() {
  const auto a = app::run_tandem(tandem_protocol(ObservationKind::Timed)).report.dump();
  const auto b = app::run_tandem(tandem_protocol(ObservationKind::Timed)).report.dump();
  return {a == b, fmt("two runs, %zu bytes each, hashes %s and %s", a.size(), app::fnv1a_hex(a).c_str(),
                      app::fnv1a_hex(b).c_str())};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"oracle equivalence", oracle_equivalence},
      {"monotone likelihood", monotone_likelihood},
      {"minorization gap", minorization_gap},
      {"parser and composition fidelity", composition_fidelity},
      {"tandem timed estimation", tandem_timed},
      {"tandem untimed estimation", tandem_untimed},
      {"SIR reduced-scale pipeline", sir_pipeline},
      {"closed-form consistency", closed_form_consistency},
      {"determinism", determinism},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));
  int failures = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const int id = static_cast<int>(k) + 1;
    if (!selected.empty() && !selected.count(id)) continue;
    Outcome out;
    try {
      out = criteria[k].second();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    failures += !out.pass;
    std::printf("%s criterion %d (%s): %s\n", out.pass ? "PASS" : "FAIL", id, criteria[k].first, out.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
