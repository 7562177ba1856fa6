#pragma once

#include <stdexcept>
#include <string>

namespace troupe {

// Base class for everything this library throws on purpose.
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Invalid configuration: unknown role, missing profile cell, bad hyperparameters.
struct config_error : error {
    using error::error;
};

// An argument outside its documented domain (out-of-range similarity, empty pool).
struct domain_error : error {
    using error::error;
};

// A caller broke an API contract (missing per-agent similarity, answer-kind mismatch).
struct contract_error : error {
    using error::error;
};

// Unparseable model output or file content; message carries the offending context.
struct parse_error : error {
    using error::error;
};

// Filesystem / transport failures.
struct io_error : error {
    using error::error;
};

// Snapshot format_version the loader does not understand.
struct version_error : io_error {
    using io_error::io_error;
};

} // namespace troupe
