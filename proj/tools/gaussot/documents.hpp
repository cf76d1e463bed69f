#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gaussot/gaussot.hpp"

namespace gaussot::cli {

using Json = nlohmann::json;

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kFormatVersion = 1;

// Problem with an input file or flag; maps to exit code 2.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// {"dim": d, "mean": [...], "cov": [[...], ...], "label": "..."}; mean and
// label are optional.
struct MatrixDocument {
  Index dim = 0;
  Vector mean;
  Matrix cov;
  std::string label;
};

// Parses and validates a law document. Covariances whose asymmetry is at most
// 1e-9 * max(1, max |cov|) are symmetrized and a warning is appended; larger
// asymmetry is an InputError.
MatrixDocument parse_matrix_document(const Json& doc, const std::string& source, std::vector<std::string>& warnings);
MatrixDocument load_matrix_document(const std::string& path, std::vector<std::string>& warnings);

GaussianLaw to_law(const MatrixDocument& doc, double psd_tol);

// {"O": [[...]], "C": [[...]]}
struct FrameDocument {
  Matrix o;
  Matrix c;
};

FrameDocument load_frame_document(const std::string& path);

Json read_json_file(const std::string& path);

Json to_json(const Matrix& m);
Json to_json(const Vector& v);
Matrix matrix_from_json(const Json& j, const std::string& what);
Vector vector_from_json(const Json& j, const std::string& what);

// Envelope shared by every command.
Json result_document(const std::string& command, Json inputs, Json outputs);

// Sorted keys (nlohmann's default object map) and shortest round-trip floats,
// so parse(dump(doc)) dumps to the same bytes.
std::string canonical_dump(const Json& doc);

}  // namespace gaussot::cli
