#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "clausekit/cnf.hpp"
#include "clausekit/dimacs.hpp"

namespace clausekit::bench {

namespace fs = std::filesystem;

struct LoadOptions {
  bool strict = false;       // abort on the first bad file
  bool check_uf20_91 = false;  // require 20 variables and 91 clauses
};

struct LoadError {
  std::string file;
  std::string message;
};

struct Dataset {
  std::vector<std::string> names;  // file names, sorted
  std::vector<fs::path> paths;
  std::vector<CnfFormula> formulas;
  std::vector<LoadError> errors;
  std::vector<std::string> warnings;

  [[nodiscard]] std::size_t size() const { return formulas.size(); }
};

class DatasetError : public std::runtime_error {
 public:
  DatasetError(const std::string& file, const std::string& message)
      : std::runtime_error(file + ": " + message), file_(file) {}
  [[nodiscard]] const std::string& file() const { return file_; }

 private:
  std::string file_;
};

/// Regular files ending in `.cnf`, sorted by file name.
inline std::vector<fs::path> list_cnf_files(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw DatasetError(dir.string(), "not a directory");
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".cnf") out.push_back(e.path());
  std::sort(out.begin(), out.end(), [](const fs::path& a, const fs::path& b) { return a.filename() < b.filename(); });
  return out;
}

inline Dataset load_files(const std::vector<fs::path>& files, const LoadOptions& opts = {}) {
  Dataset d;
  for (const auto& path : files) {
    const std::string name = path.filename().string();
    try {
      CnfFormula f = read_dimacs_file(path.string());
      if (opts.check_uf20_91 && (f.num_vars() != 20 || f.num_clauses() != 91))
        throw std::runtime_error("expected 20 variables and 91 clauses, got " + std::to_string(f.num_vars()) + " and " +
                                 std::to_string(f.num_clauses()));
      d.names.push_back(name);
      d.paths.push_back(path);
      d.formulas.push_back(std::move(f));
    } catch (const std::exception& e) {
      if (opts.strict) throw DatasetError(name, e.what());
      d.errors.push_back({name, e.what()});
    }
  }
  return d;
}

inline Dataset load_dataset(const fs::path& dir, const LoadOptions& opts = {}) {
  auto files = list_cnf_files(dir);
  Dataset d = load_files(files, opts);
  if (files.empty()) d.warnings.push_back("no .cnf files in " + dir.string());
  return d;
}

struct DatasetSplit {
  std::vector<fs::path> train;
  std::vector<fs::path> test;
  std::uint64_t seed = 0;
};

/// Sorts by file name, shuffles with `seed`, then takes floor(N * ratio)
/// files for training and the rest for testing.
inline DatasetSplit split_dataset(std::vector<fs::path> files, double ratio, std::uint64_t seed) {
  if (!(ratio > 0.0 && ratio < 1.0)) throw std::invalid_argument("split ratio must lie in (0, 1)");
  std::sort(files.begin(), files.end(), [](const fs::path& a, const fs::path& b) { return a.filename() < b.filename(); });
  std::mt19937_64 rng(seed);
  std::shuffle(files.begin(), files.end(), rng);
  // The epsilon keeps products like 5 * 0.8 from flooring to 3.
  const auto n_train = static_cast<std::size_t>(std::floor(static_cast<double>(files.size()) * ratio + 1e-9));
  DatasetSplit s;
  s.seed = seed;
  s.train.assign(files.begin(), files.begin() + static_cast<std::ptrdiff_t>(n_train));
  s.test.assign(files.begin() + static_cast<std::ptrdiff_t>(n_train), files.end());
  return s;
}

}  // namespace clausekit::bench
