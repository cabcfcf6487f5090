#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "fnclin/system_model.hpp"

namespace fnclin {

inline constexpr int kTgParamCount = 6;   // (T^r, T^g, T^c, F^g, R^g, H^g)
inline constexpr int kResParamCount = 3;  // (T^v, R^v, H^v)

enum class UnitKind { Tg, Res };

std::array<double, kTgParamCount> tg_phi(const TgParams& tg);
std::array<double, kResParamCount> res_phi(const ResParams& res);

/// Per-column min/max used to map raw unit parameters onto [0, 1] before the
/// random projection. Degenerate columns are widened so lo < hi always.
struct ColumnScaler {
  std::vector<double> lo;
  std::vector<double> hi;

  static ColumnScaler fit(const std::vector<std::vector<double>>& rows, std::size_t columns);
  double scale(std::size_t column, double value) const;
  bool operator==(const ColumnScaler&) const = default;
};

/// Random hidden layer shared by all TGs (a_g, b_g) and by all RESs (a_v, b_v).
struct ElmWeights {
  Eigen::MatrixXd a_g;  // n_hidden x 6
  Eigen::VectorXd b_g;
  Eigen::MatrixXd a_v;  // n_hidden x 3
  Eigen::VectorXd b_v;
  std::uint64_t seed = 0;
  ColumnScaler tg_scaler;
  ColumnScaler res_scaler;

  int n_hidden() const { return static_cast<int>(b_g.size()); }
  void validate() const;
  bool operator==(const ElmWeights&) const;
};

/// Draws all weights i.i.d. uniform on [-1, 1] from a splitmix64 stream, so
/// the same seed reproduces bit-identical weights on any platform.
ElmWeights init_weights(int n_hidden, std::uint64_t seed, const SystemModel& model);

/// Sigmoid embedding psi = 1 / (1 + exp(-(a * scale(phi) + b))).
Eigen::VectorXd embed_unit(const ElmWeights& weights, std::span<const double> phi,
                           UnitKind kind);

/// Index arithmetic for the feature layout
///   [TG_0: psi, phi] ... [TG_n: psi, phi] [RES_0: psi, phi] ... [H].
struct FeatureLayout {
  std::size_t tg_count = 0;
  std::size_t res_count = 0;
  std::size_t n_hidden = 0;

  std::size_t tg_block() const { return n_hidden + kTgParamCount; }
  std::size_t res_block() const { return n_hidden + kResParamCount; }
  std::size_t tg_offset(std::size_t i) const { return i * tg_block(); }
  std::size_t res_offset(std::size_t j) const {
    return tg_count * tg_block() + j * res_block();
  }
  std::size_t inertia_index() const { return tg_count * tg_block() + res_count * res_block(); }
  std::size_t dim() const { return inertia_index() + 1; }
};

FeatureLayout feature_layout(const ElmWeights& weights, const SystemModel& model);

/// Scenario -> [Psi', Phi', H]. Offline units contribute an all-zero block.
Eigen::VectorXd feature_vector(const ElmWeights& weights, const SystemModel& model,
                               const CommitmentScenario& scenario);

/// Raw decision-scaled parameters [Phi'_i..., Phi'_j..., H] without the random
/// layer; the input space of the two-step baseline.
Eigen::VectorXd raw_feature_vector(const SystemModel& model, const CommitmentScenario& scenario);

/// The feature map written as
///   z = base + sum_i x_i * tg_dir[i] + sum_j (x_j * P_j[MW]) * res_dir[j].
/// Holds exactly for every scenario; this is what turns a segment into a
/// linear inequality on the decisions.
struct AffineFeatureMap {
  Eigen::VectorXd base;
  std::vector<Eigen::VectorXd> tg_dir;
  std::vector<Eigen::VectorXd> res_dir;  // per MW of participating output

  Eigen::VectorXd apply(const CommitmentScenario& scenario) const;
};

AffineFeatureMap affine_feature_map(const ElmWeights& weights, const SystemModel& model);

}  // namespace fnclin
