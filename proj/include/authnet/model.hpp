#pragma once

// Two-component mixture over similarity vectors. Features are conditionally
// independent given the component; each feature has a Gaussian, Exponential,
// or binned Multinomial density shared in form by both components. Parameters
// are fitted by EM; the matching score is the log posterior odds.
//
// Model file:
//
//   authnet-model 1
//   prior <p>
//   feature <i> gaussian <mean_M> <var_M> <mean_U> <var_U>
//   feature <i> exponential <rate_M> <rate_U>
//   feature <i> multinomial <lo> <hi> <bins> <p_M...> <p_U...>

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <numeric>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "authnet/common.hpp"
#include "authnet/similarity.hpp"

namespace authnet {

enum class Family { Gaussian, Exponential, Multinomial };

inline const char* family_name(Family f) {
  switch (f) {
    case Family::Gaussian:
      return "gaussian";
    case Family::Exponential:
      return "exponential";
    case Family::Multinomial:
      return "multinomial";
  }
  return "?";
}

inline Family parse_family(std::string_view s) {
  auto t = detail::to_lower(detail::trim(s));
  if (t == "gaussian") return Family::Gaussian;
  if (t == "exponential") return Family::Exponential;
  if (t == "multinomial") return Family::Multinomial;
  throw FormatError("unknown feature family '" + std::string(s) + "'");
}

using FamilyAssignment = std::array<Family, kFeatureCount>;

inline FamilyAssignment default_families() {
  return {Family::Gaussian,    Family::Exponential, Family::Gaussian,
          Family::Exponential, Family::Exponential, Family::Exponential};
}

inline constexpr double kMinVariance = 1e-6;
inline constexpr double kMinExponentialMean = 1e-6;
inline constexpr double kZeroShift = 1e-9;
// Exponential means are floored at this fraction of the feature's pooled mean,
// which bounds the rate of a component made only of zeros.
inline constexpr double kMeanFloorFraction = 0.2;
inline constexpr double kScoreClamp = 700.0;

struct FeatureDist {
  Family family = Family::Gaussian;
  double mean = 0.0;
  double variance = 1.0;
  double rate = 1.0;
  double lo = 0.0;
  double hi = 1.0;
  std::vector<double> probs;

  std::size_t bin(double x) const {
    const auto k = probs.size();
    const double t = (x - lo) / (hi - lo) * static_cast<double>(k);
    if (!(t > 0)) return 0;
    return std::min(k - 1, static_cast<std::size_t>(t));
  }

  double log_density(double x) const {
    switch (family) {
      case Family::Gaussian: {
        const double d = x - mean;
        return -0.5 * std::log(2.0 * M_PI * variance) - d * d / (2.0 * variance);
      }
      case Family::Exponential:
        return std::log(rate) - rate * (x > 0 ? x : kZeroShift);
      case Family::Multinomial:
        return std::log(probs[bin(x)]);
    }
    return 0.0;
  }

  friend bool operator==(const FeatureDist&, const FeatureDist&) = default;
};

struct ModelParams {
  double prior = 0.1;
  std::array<FeatureDist, kFeatureCount> matched;
  std::array<FeatureDist, kFeatureCount> unmatched;

  FamilyAssignment families() const {
    FamilyAssignment f;
    for (std::size_t i = 0; i < kFeatureCount; ++i) f[i] = matched[i].family;
    return f;
  }

  void validate() const {
    if (!(prior > 0.0 && prior < 1.0)) throw DomainError("prior must lie in (0, 1)");
    for (std::size_t i = 0; i < kFeatureCount; ++i) {
      for (const auto* d : {&matched[i], &unmatched[i]}) {
        if (d->family != matched[i].family) throw DomainError("component families differ");
        switch (d->family) {
          case Family::Gaussian:
            if (!(d->variance > 0) || !std::isfinite(d->mean)) throw DomainError("invalid Gaussian");
            break;
          case Family::Exponential:
            if (!(d->rate > 0) || !std::isfinite(d->rate)) throw DomainError("invalid rate");
            break;
          case Family::Multinomial: {
            if (d->probs.empty() || !(d->hi > d->lo)) throw DomainError("invalid bins");
            double s = 0.0;
            for (double p : d->probs) {
              if (!(p > 0)) throw DomainError("multinomial probability must be positive");
              s += p;
            }
            if (std::abs(s - 1.0) > 1e-9) throw DomainError("multinomial probabilities must sum to 1");
            break;
          }
        }
      }
      if (matched[i].probs.size() != unmatched[i].probs.size()) throw DomainError("bin counts differ");
    }
  }

  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

// Log joint densities of both components, missing features dropped.
inline std::pair<double, double> component_log_densities(const SimilarityVector& s, const ModelParams& m) {
  double a = std::log(m.prior);
  double b = std::log1p(-m.prior);
  for (std::size_t i = 0; i < kFeatureCount; ++i) {
    if (s.missing[i]) continue;
    a += m.matched[i].log_density(s.g[i]);
    b += m.unmatched[i].log_density(s.g[i]);
  }
  return {a, b};
}

struct MatchDecision {
  double score = 0.0;         // log posterior odds, clamped to +-700
  double posterior = 0.0;     // Pr(matched | gamma)
  double complement = 0.0;    // Pr(unmatched | gamma)
  bool merged = false;        // score >= delta
  bool degenerate = false;    // both densities vanished; posterior is the prior
};

inline MatchDecision evaluate_match(const SimilarityVector& s, const ModelParams& m, double delta = 0.0) {
  MatchDecision d;
  auto [a, b] = component_log_densities(s, m);
  if (!std::isfinite(a) && !std::isfinite(b)) {
    d.degenerate = true;
    d.posterior = m.prior;
    d.complement = 1.0 - m.prior;
    d.score = std::clamp(std::log(m.prior) - std::log1p(-m.prior), -kScoreClamp, kScoreClamp);
  } else {
    const double lo = a - b;
    d.score = std::isnan(lo) ? 0.0 : std::clamp(lo, -kScoreClamp, kScoreClamp);
    if (lo >= 0) {
      const double e = std::exp(-lo);
      d.posterior = 1.0 / (1.0 + e);
      d.complement = e / (1.0 + e);
    } else {
      const double e = std::exp(lo);
      d.posterior = e / (1.0 + e);
      d.complement = 1.0 / (1.0 + e);
    }
  }
  d.merged = d.score >= delta;
  return d;
}

inline double posterior_match(const SimilarityVector& s, const ModelParams& m) {
  return evaluate_match(s, m).posterior;
}

inline double matching_score(const SimilarityVector& s, const ModelParams& m) {
  return evaluate_match(s, m).score;
}

// ---------------------------------------------------------------------------
// EM

struct FitOptions {
  FamilyAssignment families = default_families();
  double tol = 1e-6;
  int max_iter = 200;
  double init_prior = 0.1;
  std::size_t bins = 10;
  double smoothing = 0.5;  // Dirichlet pseudo-count per multinomial bin
  double mean_floor_fraction = kMeanFloorFraction;
  std::optional<ModelParams> init;
  unsigned workers = 1;
};

struct FitTrace {
  // Objective after each parameter update, starting with the initial parameters.
  // Equals the observed-data log-likelihood plus, for multinomial features, the
  // log Dirichlet smoothing prior.
  std::vector<double> objective;
  int iterations = 0;
  bool converged = false;
  int restarts = 0;
  bool swapped = false;  // component labels exchanged to put higher similarity in "matched"
};

struct FitResult {
  ModelParams params;
  FitTrace trace;
};

namespace detail {

class DegenerateFit : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline double log_sum_exp(double a, double b) {
  const double m = std::max(a, b);
  if (!std::isfinite(m)) return m;
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

inline double multinomial_penalty(const ModelParams& m, double smoothing) {
  double s = 0.0;
  for (std::size_t i = 0; i < kFeatureCount; ++i) {
    if (m.matched[i].family != Family::Multinomial) continue;
    for (double p : m.matched[i].probs) s += smoothing * std::log(p);
    for (double p : m.unmatched[i].probs) s += smoothing * std::log(p);
  }
  return s;
}

}  // namespace detail

// Responsibilities under `m`; returns the observed-data log-likelihood.
inline double e_step(const std::vector<SimilarityVector>& data, const ModelParams& m,
                     std::vector<double>& resp, unsigned workers = 1) {
  resp.assign(data.size(), 0.0);
  std::vector<double> ll(data.size());
  detail::parallel_for(data.size(), workers, [&](std::size_t j) {
    auto [a, b] = component_log_densities(data[j], m);
    const double t = detail::log_sum_exp(a, b);
    ll[j] = t;
    resp[j] = std::isfinite(t) ? std::exp(a - t) : m.prior;
  });
  return std::accumulate(ll.begin(), ll.end(), 0.0);
}

inline double observed_log_likelihood(const std::vector<SimilarityVector>& data, const ModelParams& m) {
  std::vector<double> resp;
  return e_step(data, m, resp);
}

// Weighted MLE of one feature density from present values. `shape` supplies
// the family and, for multinomials, the bin range and count.
inline FeatureDist fit_feature(const std::vector<SimilarityVector>& data, const std::vector<double>& w,
                               std::size_t feature, const FeatureDist& shape, double smoothing,
                               double mean_floor_fraction = kMeanFloorFraction) {
  FeatureDist d = shape;
  double sw = 0.0;
  for (std::size_t j = 0; j < data.size(); ++j) {
    if (data[j].present(feature)) sw += w[j];
  }
  if (!(sw > 1e-12)) return d;
  switch (d.family) {
    case Family::Gaussian: {
      double mean = 0.0;
      for (std::size_t j = 0; j < data.size(); ++j) {
        if (data[j].present(feature)) mean += w[j] * data[j].g[feature];
      }
      mean /= sw;
      double var = 0.0;
      for (std::size_t j = 0; j < data.size(); ++j) {
        if (!data[j].present(feature)) continue;
        const double x = data[j].g[feature] - mean;
        var += w[j] * x * x;
      }
      d.mean = mean;
      d.variance = std::max(var / sw, kMinVariance);
      break;
    }
    case Family::Exponential: {
      double s = 0.0, pooled = 0.0;
      std::size_t n = 0;
      for (std::size_t j = 0; j < data.size(); ++j) {
        if (!data[j].present(feature)) continue;
        const double x = data[j].g[feature];
        s += w[j] * (x > 0 ? x : kZeroShift);
        pooled += x;
        ++n;
      }
      const double floor = std::max(kMinExponentialMean, mean_floor_fraction * pooled / static_cast<double>(n));
      d.rate = 1.0 / std::max(s / sw, floor);
      break;
    }
    case Family::Multinomial: {
      std::vector<double> c(d.probs.size(), smoothing);
      for (std::size_t j = 0; j < data.size(); ++j) {
        if (data[j].present(feature)) c[d.bin(data[j].g[feature])] += w[j];
      }
      const double total = sw + smoothing * static_cast<double>(c.size());
      for (std::size_t k = 0; k < c.size(); ++k) d.probs[k] = c[k] / total;
      break;
    }
  }
  return d;
}

// Parameter template: families set, multinomial bins spanning the data range.
inline ModelParams initial_shape(const std::vector<SimilarityVector>& data, const FitOptions& opts) {
  ModelParams m;
  m.prior = opts.init_prior;
  for (std::size_t i = 0; i < kFeatureCount; ++i) {
    FeatureDist d;
    d.family = opts.families[i];
    if (d.family == Family::Multinomial) {
      if (opts.bins < 1) throw DomainError("multinomial needs at least one bin");
      double lo = std::numeric_limits<double>::infinity();
      double hi = -lo;
      for (const auto& s : data) {
        if (!s.present(i)) continue;
        lo = std::min(lo, s.g[i]);
        hi = std::max(hi, s.g[i]);
      }
      if (!std::isfinite(lo)) lo = 0.0, hi = 1.0;
      if (!(hi > lo)) hi = lo + 1.0;
      d.lo = lo;
      d.hi = hi;
      d.probs.assign(opts.bins, 1.0 / static_cast<double>(opts.bins));
    }
    m.matched[i] = d;
    m.unmatched[i] = d;
  }
  return m;
}

// Table-of-MLEs update with frozen responsibilities. The prior is the mean
// responsibility.
inline ModelParams m_step(const std::vector<SimilarityVector>& data, const std::vector<double>& resp,
                          const ModelParams& shape, double smoothing,
                          double mean_floor_fraction = kMeanFloorFraction) {
  ModelParams m = shape;
  std::vector<double> wm(resp), wu(resp.size());
  double sm = 0.0, su = 0.0;
  for (std::size_t j = 0; j < resp.size(); ++j) {
    wu[j] = 1.0 - resp[j];
    sm += wm[j];
    su += wu[j];
  }
  if (sm < 1.0 || su < 1.0) throw detail::DegenerateFit("all responsibility on one component");
  m.prior = sm / static_cast<double>(resp.size());
  for (std::size_t i = 0; i < kFeatureCount; ++i) {
    m.matched[i] = fit_feature(data, wm, i, shape.matched[i], smoothing, mean_floor_fraction);
    m.unmatched[i] = fit_feature(data, wu, i, shape.unmatched[i], smoothing, mean_floor_fraction);
  }
  return m;
}

inline double l1_norm(const SimilarityVector& s) {
  double n = 0.0;
  for (std::size_t i = 0; i < kFeatureCount; ++i) {
    if (s.present(i)) n += std::abs(s.g[i]);
  }
  return n;
}

// Hard start: the top `fraction` of vectors by l1 norm are matched.
inline ModelParams heuristic_init(const std::vector<SimilarityVector>& data, const FitOptions& opts,
                                  double fraction) {
  const auto shape = initial_shape(data, opts);
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return l1_norm(data[a]) > l1_norm(data[b]); });
  auto top = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(data.size())));
  top = std::clamp<std::size_t>(top, 1, data.size() - 1);
  std::vector<double> resp(data.size(), 0.0);
  for (std::size_t k = 0; k < top; ++k) resp[order[k]] = 1.0;
  ModelParams m = shape;
  std::vector<double> wu(resp.size());
  for (std::size_t j = 0; j < resp.size(); ++j) wu[j] = 1.0 - resp[j];
  for (std::size_t i = 0; i < kFeatureCount; ++i) {
    m.matched[i] = fit_feature(data, resp, i, shape.matched[i], opts.smoothing, opts.mean_floor_fraction);
    m.unmatched[i] = fit_feature(data, wu, i, shape.unmatched[i], opts.smoothing, opts.mean_floor_fraction);
  }
  m.prior = opts.init_prior;
  return m;
}

namespace detail {

inline FitResult run_em(const std::vector<SimilarityVector>& data, ModelParams params, const FitOptions& opts) {
  FitResult r;
  std::vector<double> resp;
  const double pen0 = multinomial_penalty(params, opts.smoothing);
  double obj = e_step(data, params, resp, opts.workers) + pen0;
  r.trace.objective.push_back(obj);
  for (int it = 0; it < opts.max_iter; ++it) {
    auto next = m_step(data, resp, params, opts.smoothing, opts.mean_floor_fraction);
    std::vector<double> next_resp;
    const double next_obj = e_step(data, next, next_resp, opts.workers) + multinomial_penalty(next, opts.smoothing);
    ++r.trace.iterations;
    r.trace.objective.push_back(next_obj);
    const double change = std::abs(next_obj - obj);
    params = std::move(next);
    resp = std::move(next_resp);
    if (change < opts.tol * std::max(1.0, std::abs(obj))) {
      r.trace.converged = true;
      obj = next_obj;
      break;
    }
    obj = next_obj;
  }
  const double sm = std::accumulate(resp.begin(), resp.end(), 0.0);
  if (sm < 1.0 || static_cast<double>(resp.size()) - sm < 1.0) {
    throw DegenerateFit("fit collapsed onto one component");
  }
  // The matched component is the one with the larger mean l1 similarity.
  double lm = 0.0, lu = 0.0;
  for (std::size_t j = 0; j < data.size(); ++j) {
    lm += resp[j] * l1_norm(data[j]);
    lu += (1.0 - resp[j]) * l1_norm(data[j]);
  }
  if (lm / sm < lu / (static_cast<double>(resp.size()) - sm)) {
    std::swap(params.matched, params.unmatched);
    params.prior = 1.0 - params.prior;
    r.trace.swapped = true;
  }
  r.params = std::move(params);
  return r;
}

}  // namespace detail

// Fits the mixture. Degenerate fits restart from wider matched seeds (top 20%,
// 30%, 50% by l1 norm) before giving up with FitError.
inline FitResult em_fit(const std::vector<SimilarityVector>& data, const FitOptions& opts = {}) {
  if (data.size() < 2) throw FitError("need at least two training vectors");
  if (!(opts.tol > 0)) throw DomainError("tol must be positive");
  if (opts.max_iter < 1) throw DomainError("max_iter must be at least 1");
  if (opts.init) {
    opts.init->validate();
    try {
      return detail::run_em(data, *opts.init, opts);
    } catch (const detail::DegenerateFit& e) {
      throw FitError(std::string("degenerate fit from supplied parameters: ") + e.what());
    }
  }
  const double fractions[] = {0.1, 0.2, 0.3, 0.5};
  int attempt = 0;
  for (double f : fractions) {
    try {
      auto r = detail::run_em(data, heuristic_init(data, opts, f), opts);
      r.trace.restarts = attempt;
      return r;
    } catch (const detail::DegenerateFit&) {
      ++attempt;
    }
  }
  throw FitError("mixture fit degenerate after 3 re-initializations");
}

// ---------------------------------------------------------------------------
// Model file

inline constexpr std::string_view kModelHeader = "authnet-model 1";

inline void write_model(std::ostream& out, const ModelParams& m) {
  using detail::format_double;
  out << kModelHeader << '\n';
  out << "prior\t" << format_double(m.prior) << '\n';
  for (std::size_t i = 0; i < kFeatureCount; ++i) {
    const auto& a = m.matched[i];
    const auto& b = m.unmatched[i];
    out << "feature\t" << i << '\t' << family_name(a.family);
    switch (a.family) {
      case Family::Gaussian:
        out << '\t' << format_double(a.mean) << '\t' << format_double(a.variance) << '\t'
            << format_double(b.mean) << '\t' << format_double(b.variance);
        break;
      case Family::Exponential:
        out << '\t' << format_double(a.rate) << '\t' << format_double(b.rate);
        break;
      case Family::Multinomial:
        out << '\t' << format_double(a.lo) << '\t' << format_double(a.hi) << '\t' << a.probs.size();
        for (double p : a.probs) out << '\t' << format_double(p);
        for (double p : b.probs) out << '\t' << format_double(p);
        break;
    }
    out << '\n';
  }
}

inline std::string model_to_string(const ModelParams& m) {
  std::ostringstream os;
  write_model(os, m);
  return os.str();
}

inline ModelParams read_model(std::istream& in) {
  ModelParams m;
  std::string line;
  bool header = false, prior = false;
  std::array<bool, kFeatureCount> seen{};
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (detail::trim(line).empty()) continue;
    if (!header) {
      if (line != kModelHeader) throw FormatError("not a model file (bad header)");
      header = true;
      continue;
    }
    auto f = detail::split_ws(line);
    auto where = " at line " + std::to_string(lineno);
    if (f[0] == "prior") {
      if (f.size() != 2) throw FormatError("prior line needs one value" + where);
      m.prior = detail::parse_double(f[1], "prior");
      prior = true;
    } else if (f[0] == "feature") {
      if (f.size() < 3) throw FormatError("truncated feature line" + where);
      auto i = detail::parse_int<std::size_t>(f[1], "feature index");
      if (i >= kFeatureCount) throw FormatError("feature index out of range" + where);
      FeatureDist a, b;
      a.family = b.family = parse_family(f[2]);
      auto num = [&](std::size_t k) {
        if (k >= f.size()) throw FormatError("truncated feature line" + where);
        return detail::parse_double(f[k], "parameter");
      };
      switch (a.family) {
        case Family::Gaussian:
          a.mean = num(3), a.variance = num(4), b.mean = num(5), b.variance = num(6);
          break;
        case Family::Exponential:
          a.rate = num(3), b.rate = num(4);
          break;
        case Family::Multinomial: {
          a.lo = b.lo = num(3);
          a.hi = b.hi = num(4);
          if (f.size() < 6) throw FormatError("truncated feature line" + where);
          auto k = detail::parse_int<std::size_t>(f[5], "bins");
          if (f.size() != 6 + 2 * k) throw FormatError("wrong number of bin probabilities" + where);
          for (std::size_t t = 0; t < k; ++t) a.probs.push_back(num(6 + t));
          for (std::size_t t = 0; t < k; ++t) b.probs.push_back(num(6 + k + t));
          break;
        }
      }
      m.matched[i] = a;
      m.unmatched[i] = b;
      seen[i] = true;
    } else {
      throw FormatError("unknown model line '" + std::string(f[0]) + "'" + where);
    }
  }
  if (!header) throw FormatError("empty model file");
  if (!prior) throw FormatError("model file lacks a prior");
  for (std::size_t i = 0; i < kFeatureCount; ++i) {
    if (!seen[i]) throw FormatError("model file lacks feature " + std::to_string(i));
  }
  try {
    m.validate();
  } catch (const DomainError& e) {
    throw FormatError(std::string("invalid model: ") + e.what());
  }
  return m;
}

inline void save_model(const std::string& path, const ModelParams& m) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write model file: " + path);
  write_model(out, m);
}

inline ModelParams load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open model file: " + path);
  return read_model(in);
}

}  // namespace authnet
