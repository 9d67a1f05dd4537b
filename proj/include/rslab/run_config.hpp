#ifndef RSLAB_RUN_CONFIG_HPP
#define RSLAB_RUN_CONFIG_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "rslab/rankin.hpp"

namespace rslab {

/*
 * Everything a CLI run needs. Built from a JSON object whose keys are the
 * long flag names; the CLI overlays set flags on the config file's object
 * before parsing, so flags win.
 */
struct RunConfig {
    std::string verb;
    std::string curve;                       // curve JSON path
    std::vector<std::int64_t> disc;          // explicit list
    std::optional<std::pair<std::int64_t, std::int64_t>> disc_range;
    std::string out;                         // empty: stdout
    std::string format = "csv";
    std::string cache = "rslab-cache";
    int jobs = 0;                            // 0: OpenMP default
    bool force = false;
    std::optional<double> kernel_sigma;
    std::optional<double> kernel_T;
    double cutoff_mult = 12.0;
    // series
    std::int64_t a = 0;
    std::pair<std::int64_t, std::int64_t> b_range{1, 10};
    double s = 2.0;
    std::int64_t n_max = 0;
    // kernels
    std::vector<double> x_grid{1e-4, 1e-2, 1.0, 10.0, 1e4, 1e6};

    static RunConfig from_json(nlohmann::json const & j);
    void validate() const;
    TruncationParams truncation() const;
    /*
     * Explicit discriminants as given (validated later per row), then the
     * fundamental discriminants of the range in increasing |D|.
     */
    std::vector<std::int64_t> discriminants() const;
};

/// "LO:HI" with LO <= HI.
std::pair<std::int64_t, std::int64_t> parse_range(std::string const & text);
/// Comma-separated integers.
std::vector<std::int64_t> parse_int_list(std::string const & text);
std::vector<double> parse_double_list(std::string const & text);

} // namespace rslab

#endif
