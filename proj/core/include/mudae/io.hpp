#pragma once

#include "mudae/certify.hpp"
#include "mudae/model.hpp"
#include "mudae/regionscan.hpp"
#include "mudae/spectra.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace mudae {

/// Shortest decimal form with 17 significant digits; round-trips doubles
/// exactly and keeps text outputs byte-stable.
std::string format_double(double v);

/// FNV-1a 64-bit hash, used for output manifests and determinism checks.
std::uint64_t fnv1a64(const std::string& bytes);

// Model file.
std::string model_to_json(const AffineJacobianModel& model);
AffineJacobianModel model_from_json(const std::string& text);

// Box file: {"boxes": {"0": [lo, hi], ...}}.
std::string box_to_json(const BoxSpec& box);
BoxSpec box_from_json(const std::string& text);

// Certificate files. Point form carries P/R/Q, zeta, mode, point; the box
// form carries P/R/Q, zeta_star, the physical box, and optionally the grow
// scale alpha.
std::string certificate_to_json(const Certificate& cert);
std::string certified_box_to_json(const CertifiedBox& box,
                                  std::optional<double> alpha = std::nullopt);
AuxiliaryMatrix aux_matrix_from_json(const std::string& text);
BoxSpec box_from_certificate_json(const std::string& text);

// CSV builders (shared by the CLI and the acceptance suite so determinism
// checks exercise the real emission path).
std::string eigs_csv(const PencilSpectrum& spectrum);
std::string rootlocus_csv(const std::vector<RootLocusStep>& steps, int n);
std::string sensitivity_csv(const std::vector<SensitivityStep>& steps,
                            const AffineJacobianModel& model,
                            const std::vector<int>& coords, int var);
std::string scan_csv(const AffineJacobianModel& model, const ScanResult& scan);
std::string area_csv(const std::vector<CenterOutcome>& centers);
std::string fits_json(const RegressionFit& exact, const RegressionFit& bmi);

// File helpers.
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

} // namespace mudae
