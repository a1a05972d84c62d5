#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace sbrnn {

/// One evaluated (system, distance, eta, variant) point.
/// For MLSD rows `bler` holds the symbol error rate and there is no lower bound.
struct ResultRow {
  std::string system;
  double distance_km = 0.0;
  int eta = 0;
  double bler = 0.0;
  double ber = 0.0;
  std::optional<double> ber_lower_bound;
  std::string labeling;  ///< gray, random, optimized
  std::string weights;   ///< uniform, optimized, none
  double flops_pdb = 0.0;
  std::uint64_t seed = 0;
  std::string config_hash;

  void validate() const;
  bool operator==(const ResultRow&) const = default;
};

inline constexpr const char* kResultHeader =
    "system,distance_km,eta,bler,ber,ber_lower_bound,labeling,weights,flops_pdb,seed,config_hash";

/// Deterministic order: system, distance, eta, labeling, weights.
void sort_rows(std::vector<ResultRow>& rows);

std::string format_csv(const std::vector<ResultRow>& rows);
std::vector<ResultRow> parse_csv(const std::string& text);

/// log10(BER) against distance, one polyline per (system, eta). For each
/// series the best available variant is drawn (optimized labeling and
/// weights for the SBRNN). A dashed reference line is drawn at `hd_fec` when set.
std::string render_svg(const std::vector<ResultRow>& rows, std::optional<double> hd_fec);

}  // namespace sbrnn
