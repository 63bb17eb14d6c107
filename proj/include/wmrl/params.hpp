#ifndef WMRL_PARAMS_HPP
#define WMRL_PARAMS_HPP

// Model kinds, variation flags and the bounded free-parameter vector.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wmrl/core.hpp"

namespace wmrl {

enum class ModelKind { QL, BWM, Mixture, Coordination };

inline std::string_view to_string(ModelKind k) {
  switch (k) {
    case ModelKind::QL: return "ql";
    case ModelKind::BWM: return "bwm";
    case ModelKind::Mixture: return "mixture";
    case ModelKind::Coordination: return "coordination";
  }
  return "?";
}

inline ModelKind parse_model_kind(std::string_view s) {
  if (s == "ql" || s == "qlearning") return ModelKind::QL;
  if (s == "bwm") return ModelKind::BWM;
  if (s == "mixture") return ModelKind::Mixture;
  if (s == "coordination") return ModelKind::Coordination;
  throw ConfigError("unknown model kind: " + std::string(s));
}

inline bool uses_qlearning(ModelKind k) { return k != ModelKind::BWM; }
inline bool uses_memory(ModelKind k) { return k != ModelKind::QL; }

struct VariationFlags {
  bool free_gamma = false;
  bool no_init = false;
  bool decay = false;
  bool ant = false;
  bool meta = false;
  bool thr = false;

  bool operator==(const VariationFlags&) const = default;
};

/// Rejects flag combinations a model kind is not concerned by.
inline void validate_flags(ModelKind kind, const VariationFlags& f) {
  const auto fail = [&](const char* what) {
    throw ConfigError(std::string(what) + " is not available for model " + std::string(to_string(kind)));
  };
  if (kind == ModelKind::BWM && (f.free_gamma || f.no_init || f.decay || f.thr)) fail("a q-learning variation");
  if (kind == ModelKind::QL && (f.ant || f.thr)) fail("a working-memory variation");
  if (f.meta && kind != ModelKind::Coordination) fail("META-L");
  if (f.thr && kind != ModelKind::Mixture && kind != ModelKind::Coordination) fail("THR");
}

inline constexpr int kNumVariations = 7;

/// Flags of a numbered variation; throws for the cells a model kind does not have.
inline VariationFlags variation_flags(ModelKind kind, int variation) {
  const auto none = [&]() -> VariationFlags {
    throw ConfigError("variation " + std::to_string(variation) + " does not exist for model " +
                      std::string(to_string(kind)));
  };
  VariationFlags f;
  switch (variation) {
    case 1:
      return f;
    case 2:
    case 3:
    case 4:
      if (kind == ModelKind::BWM) return none();
      f.free_gamma = true;
      f.no_init = variation >= 3;
      f.decay = variation >= 4;
      return f;
    case 5:
      if (kind == ModelKind::QL) return none();
      f.ant = true;
      if (kind != ModelKind::BWM) f.free_gamma = f.no_init = f.decay = true;
      return f;
    case 6:
      if (kind != ModelKind::Coordination) return none();
      f.free_gamma = f.no_init = f.decay = f.meta = true;
      return f;
    case 7:
      if (kind != ModelKind::Mixture && kind != ModelKind::Coordination) return none();
      f.no_init = f.decay = f.thr = true;
      f.free_gamma = kind == ModelKind::Coordination;
      return f;
    default:
      throw ConfigError("variation must be in 1..7, got " + std::to_string(variation));
  }
}

enum class ParamId { Alpha, Beta, Gamma, Kappa, N, Theta, Sigma, Eta, Lambda1, Lambda2, Xi1, Xi2, W0 };
inline constexpr std::size_t kNumParams = 13;

struct Bound {
  double lo = 0.0;
  double hi = 1.0;
};

struct ParamInfo {
  ParamId id;
  std::string_view name;
  Bound bound;
  double fallback;  // value used when the parameter is not free
};

inline constexpr std::array<ParamInfo, kNumParams> kParamTable{{
    {ParamId::Alpha, "alpha", {0.0, 1.0}, 0.1},
    {ParamId::Beta, "beta", {0.0, 100.0}, 3.0},
    {ParamId::Gamma, "gamma", {0.0, 0.999}, 0.0},
    {ParamId::Kappa, "kappa", {0.0, 1.0}, 1.0},
    {ParamId::N, "N", {1.0, 15.0}, 5.0},
    {ParamId::Theta, "theta", {0.0, kMaxEntropy}, 1.0},
    {ParamId::Sigma, "sigma", {0.0, 3.0}, 1.0},
    {ParamId::Eta, "eta", {0.0, 1.0}, 0.1},
    {ParamId::Lambda1, "lambda1", {0.0, 20.0}, 1.0},
    {ParamId::Lambda2, "lambda2", {0.0, 20.0}, 1.0},
    {ParamId::Xi1, "xi1", {-20.0, 0.0}, -20.0},
    {ParamId::Xi2, "xi2", {0.0, 20.0}, 0.0},
    {ParamId::W0, "w0", {0.0, 1.0}, 0.5},
}};

inline const ParamInfo& param_info(ParamId id) { return kParamTable[static_cast<std::size_t>(id)]; }

inline ParamId parse_param(std::string_view name) {
  for (const auto& p : kParamTable)
    if (p.name == name) return p.id;
  throw ConfigError("unknown parameter: " + std::string(name));
}

class ParamVector {
 public:
  ParamVector() {
    for (const auto& p : kParamTable) values_[static_cast<std::size_t>(p.id)] = p.fallback;
  }

  double operator[](ParamId id) const { return values_[static_cast<std::size_t>(id)]; }
  double& operator[](ParamId id) { return values_[static_cast<std::size_t>(id)]; }

  ParamVector& set(ParamId id, double v) {
    (*this)[id] = v;
    return *this;
  }

  double alpha() const { return (*this)[ParamId::Alpha]; }
  double beta() const { return (*this)[ParamId::Beta]; }
  double gamma() const { return (*this)[ParamId::Gamma]; }
  double kappa() const { return (*this)[ParamId::Kappa]; }
  /// Store capacity; the continuous value is rounded to the nearest integer.
  int capacity() const { return std::max(1, static_cast<int>(std::lround((*this)[ParamId::N]))); }
  double theta() const { return (*this)[ParamId::Theta]; }
  double sigma() const { return (*this)[ParamId::Sigma]; }
  double eta() const { return (*this)[ParamId::Eta]; }
  double lambda1() const { return (*this)[ParamId::Lambda1]; }
  double lambda2() const { return (*this)[ParamId::Lambda2]; }
  double xi1() const { return (*this)[ParamId::Xi1]; }
  double xi2() const { return (*this)[ParamId::Xi2]; }
  double w0() const { return (*this)[ParamId::W0]; }

 private:
  std::array<double, kNumParams> values_{};
};

/// Free parameters of a model kind under the given flags.
inline std::vector<ParamId> active_params(ModelKind kind, const VariationFlags& f) {
  using P = ParamId;
  std::vector<P> out;
  switch (kind) {
    case ModelKind::QL: out = {P::Alpha, P::Beta, P::Sigma}; break;
    case ModelKind::BWM: out = {P::N, P::Theta, P::Sigma, P::Eta}; break;
    case ModelKind::Mixture: out = {P::Alpha, P::Beta, P::N, P::Theta, P::Sigma, P::Eta, P::W0}; break;
    case ModelKind::Coordination:
      out = {P::Alpha, P::Beta, P::N, P::Theta, P::Sigma, P::Eta, P::Lambda1, P::Lambda2};
      break;
  }
  if (f.free_gamma) out.push_back(P::Gamma);
  if (f.decay) out.push_back(P::Kappa);
  if (f.thr) {
    out.push_back(P::Xi1);
    out.push_back(P::Xi2);
  }
  return out;
}

}  // namespace wmrl

#endif  // WMRL_PARAMS_HPP
