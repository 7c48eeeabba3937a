#ifndef HOPF_IO_HPP
#define HOPF_IO_HPP

#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "hopf/core.hpp"
#include "hopf/problem.hpp"
#include "hopf/solver.hpp"

namespace hopf::io {

// Malformed problem or shape description. The message names the offending
// field as a JSON path, or the line and column for syntax errors.
class ParseError : public Error {
 public:
  using Error::Error;
};

struct Problem {
  std::string name;
  Index dimension = 0;
  Hamiltonian<double> hamiltonian;
  InitialData<double> initial;
  SolverConfig<double> solver;
};

// D_ii = 1 + (i - 1)/(n - 1) (D_11 = 1 when n = 1).
Vector<double> preset_d(Index n);
// A_ii = 2, A_ij = 1.
Matrix<double> preset_a(Index n);

// `dimension` overrides the file's "dimension" field; one of the two must
// be present.
Problem parse_problem(const nlohmann::json& doc, std::optional<Index> dimension = std::nullopt);
Problem load_problem(const std::filesystem::path& path, std::optional<Index> dimension = std::nullopt);

ConvexShape<double> parse_shape(const nlohmann::json& doc, std::optional<Index> dimension = std::nullopt);
ConvexShape<double> load_shape(const std::filesystem::path& path, std::optional<Index> dimension = std::nullopt);

// Reads a whole file as JSON, turning syntax errors into ParseError.
nlohmann::json read_json(const std::filesystem::path& path);

// "1,2.5,-3" -> vector.
Vector<double> parse_vector(const std::string& text);

}  // namespace hopf::io

#endif  // HOPF_IO_HPP
