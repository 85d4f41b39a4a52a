#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "umbilic/line_field.hpp"
#include "umbilic/umbilic.hpp"

namespace umb {

struct IndexConfig {
    double radius = 0;  ///< chart units; 0 selects 1e3 * sqrt(tol_find), clipped by neighbours
    int samples = 720;
    double tol_find = 1e-10;
};

/// Winding of the principal line field around `rec`. The circle radius is
/// clipped to half the chart distance to the nearest other record. Throws
/// NotIsolated, CircleInvalid or NonConvergentLift.
WindingResult umbilic_index(const SurfaceSpec& spec, const UmbilicRecord& rec,
                            const std::vector<UmbilicRecord>& all, const IndexConfig& cfg = {});

/// Fills twice_index, index_radius and index_samples on every isolated record.
void compute_indices(const SurfaceSpec& spec, std::vector<UmbilicRecord>& records, const IndexConfig& cfg = {});

struct PoincareHopfReport {
    int twice_sum = 0;
    double sum() const { return 0.5 * twice_sum; }
    bool pass = false;
};

/// Throws MissingIndex when a record is non-isolated or has no index.
PoincareHopfReport poincare_hopf_check(const std::vector<UmbilicRecord>& records);

/// twice_index -> number of umbilics
using IndexMultiset = std::map<int, int>;

IndexMultiset index_multiset(const std::vector<UmbilicRecord>& records);

/// e.g. "{-1/2 x8, 1 x6}"
std::string format_multiset(const IndexMultiset& ms);
std::string format_half_integer(int twice);

struct SweepRow {
    SurfaceSpec spec;
    std::string group;
    std::size_t count = 0;
    std::optional<IndexMultiset> multiset;
    std::string error;
};

struct SweepReport {
    std::vector<SweepRow> rows;
    std::map<std::string, bool> constant_by_group;
    bool constant = true;
};

/// Default grouping: the family, and for the perturbed ellipsoid also the
/// regime and the side of the threshold.
std::string sweep_group(const SurfaceSpec& spec);

/// Per-spec failures are recorded in the row and never abort the sweep.
SweepReport conjecture_sweep(const std::vector<SurfaceSpec>& specs, const FinderConfig& finder = {},
                             const IndexConfig& index = {},
                             const std::function<std::string(const SurfaceSpec&)>& group = sweep_group);

/// Parameter grids for the index sweeps.
std::vector<SurfaceSpec> superquadric_sweep_grid();
std::vector<SurfaceSpec> perturbed_sweep_grid(Regime regime);

}  // namespace umb
