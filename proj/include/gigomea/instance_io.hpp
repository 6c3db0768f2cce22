#pragma once

#include "gigomea/problems.hpp"

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <vector>

namespace gigomea
{

class InstanceFormatError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

// JSON instance files for NK-S1 and MaxCut:
//   {"kind", "variant" (MaxCut only), "ell", "k", "seed", "vtr" (null if unknown),
//    "weights": [[2^k reals], ...]}            NK-S1
//    "edges":   [[i, j, w], ...] with i < j}   MaxCut
// Doubles are printed with round-trip precision.
void write_instance(std::ostream &out, const ProblemInstance &instance);
ProblemInstance read_instance(std::istream &in);

void save_instance(const std::filesystem::path &path, const ProblemInstance &instance);
ProblemInstance load_instance(const std::filesystem::path &path);

// Loads every *.json file in a directory, sorted by file name.
std::vector<ProblemInstance> load_instance_directory(const std::filesystem::path &dir);

} // namespace gigomea
