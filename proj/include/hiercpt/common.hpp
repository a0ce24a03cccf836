// Apache License, Version 2.0, refer to LICENSE.txt
#pragma once

#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace hiercpt {

// Error taxonomy; the CLI maps each class to a distinct exit code.
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct io_error : error {
    using error::error;
};
struct data_error : error {
    using error::error;
};
struct config_error : error {
    using error::error;
};
struct numeric_error : error {
    using error::error;
};

// Round-trip-safe float formatting, 17 significant digits.
inline std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

// splitmix64 mixer; used to derive independent per-task seeds from
// (base_seed, stream_index) so results do not depend on worker count.
inline std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
    return splitmix64(splitmix64(base) ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

}  // namespace hiercpt
