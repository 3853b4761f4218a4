#pragma once

#include <filesystem>
#include <random>
#include <string>

#include "fedlinucb/spd.hpp"

namespace fedlinucb::testing {

inline Matrix random_psd(std::mt19937_64& gen, int d, int rank) {
  std::normal_distribution<double> n(0.0, 1.0);
  Matrix g(d, rank);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < rank; ++j) g(i, j) = n(gen);
  return g * g.transpose();
}

inline Vector random_vector(std::mt19937_64& gen, int d, double scale = 1.0) {
  std::normal_distribution<double> n(0.0, scale);
  Vector v(d);
  for (int i = 0; i < d; ++i) v(i) = n(gen);
  return v;
}

inline std::filesystem::path data_path(const std::string& rel) { return std::filesystem::path(FEDLINUCB_TEST_DATA_DIR) / rel; }

inline std::filesystem::path fresh_dir(const std::string& name) {
  const auto p = std::filesystem::path(FEDLINUCB_TEST_WORK_DIR) / name;
  std::filesystem::remove_all(p);
  return p;
}

}  // namespace fedlinucb::testing
