// Apache License, Version 2.0, refer to LICENSE.txt
#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "hiercpt/count_table.hpp"
#include "hiercpt/rng.hpp"

namespace testutil {

// Writes content to a fresh file under the system temp directory.
inline std::string write_temp_file(const std::string& name, const std::string& content) {
    auto dir = std::filesystem::temp_directory_path() / "hiercpt_tests";
    std::filesystem::create_directories(dir);
    auto path = dir / name;
    std::ofstream out(path, std::ios::binary);
    out << content;
    return path.string();
}

inline std::string temp_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / "hiercpt_tests" / name;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir.string();
}

// Random count table with n observations scattered over r x q cells.
inline hiercpt::CountTable random_count_table(hiercpt::Rng& rng, int r, int q, int n) {
    auto ct = hiercpt::make_count_table(r, {q});
    std::uniform_int_distribution<int> cell_x(0, r - 1), cell_y(0, q - 1);
    for (int k = 0; k < n; ++k) {
        int x = cell_x(rng), y = cell_y(rng);
        ct.counts(x, y) += 1;
        ct.col_totals(y) += 1;
    }
    return ct;
}

}  // namespace testutil
