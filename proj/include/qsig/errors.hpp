#pragma once

#include <stdexcept>
#include <string>

namespace qsig {

// Error taxonomy mirrored by the CLI exit codes:
//   config_error  -> 2, data_error -> 3, numeric_error -> 4.

struct config_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct data_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct numeric_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct invalid_bandwidth_error : config_error {
    using config_error::config_error;
};

struct invalid_level_error : config_error {
    using config_error::config_error;
};

struct invalid_variance_error : config_error {
    using config_error::config_error;
};

struct sample_too_small_error : data_error {
    using data_error::data_error;
};

struct degenerate_sample_error : data_error {
    using data_error::data_error;
};

struct empty_window_error : numeric_error {
    using numeric_error::numeric_error;
};

struct singular_design_error : numeric_error {
    using numeric_error::numeric_error;
};

}  // namespace qsig
