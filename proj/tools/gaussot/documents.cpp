#include "gaussot/documents.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace gaussot::cli {

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw InputError("cannot parse " + path + ": " + e.what());
  }
}

Matrix matrix_from_json(const Json& j, const std::string& what) {
  if (!j.is_array() || j.empty()) throw InputError(what + " must be a non-empty array of rows");
  const Index rows = static_cast<Index>(j.size());
  Index cols = -1;
  Matrix m;
  for (Index i = 0; i < rows; ++i) {
    const Json& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array()) throw InputError(what + " row " + std::to_string(i) + " is not an array");
    if (cols < 0) {
      cols = static_cast<Index>(row.size());
      if (cols == 0) throw InputError(what + " has empty rows");
      m.resize(rows, cols);
    }
    if (static_cast<Index>(row.size()) != cols) throw InputError(what + " has ragged rows");
    for (Index k = 0; k < cols; ++k) {
      const Json& x = row[static_cast<std::size_t>(k)];
      if (!x.is_number()) throw InputError(what + " has a non-numeric entry");
      m(i, k) = x.get<double>();
      if (!std::isfinite(m(i, k))) throw InputError(what + " has a non-finite entry");
    }
  }
  return m;
}

Vector vector_from_json(const Json& j, const std::string& what) {
  if (!j.is_array()) throw InputError(what + " must be an array");
  Vector v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw InputError(what + " has a non-numeric entry");
    v(static_cast<Index>(i)) = j[i].get<double>();
    if (!std::isfinite(v(static_cast<Index>(i)))) throw InputError(what + " has a non-finite entry");
  }
  return v;
}

MatrixDocument parse_matrix_document(const Json& doc, const std::string& source, std::vector<std::string>& warnings) {
  if (!doc.is_object()) throw InputError(source + ": expected an object");
  if (!doc.contains("dim") || !doc["dim"].is_number_integer() || doc["dim"].get<long long>() < 1)
    throw InputError(source + ": \"dim\" must be a positive integer");
  if (!doc.contains("cov")) throw InputError(source + ": missing \"cov\"");

  MatrixDocument out;
  out.dim = static_cast<Index>(doc["dim"].get<long long>());
  out.cov = matrix_from_json(doc["cov"], source + ": cov");
  if (out.cov.rows() != out.dim || out.cov.cols() != out.dim)
    throw InputError(source + ": cov is " + std::to_string(out.cov.rows()) + "x" + std::to_string(out.cov.cols()) +
                     " but dim is " + std::to_string(out.dim));
  if (doc.contains("mean")) {
    out.mean = vector_from_json(doc["mean"], source + ": mean");
    if (out.mean.size() != out.dim) throw InputError(source + ": mean length does not match dim");
  } else {
    out.mean = Vector::Zero(out.dim);
  }
  if (doc.contains("label")) {
    if (!doc["label"].is_string()) throw InputError(source + ": label must be a string");
    out.label = doc["label"].get<std::string>();
  }

  const double asym = (out.cov - out.cov.transpose()).cwiseAbs().maxCoeff();
  const double scale = std::max(1.0, out.cov.cwiseAbs().maxCoeff());
  if (asym > 1e-9 * scale)
    throw InputError(source + ": cov is not symmetric (max asymmetry " + std::to_string(asym) + ")");
  if (asym > 0.0) {
    std::ostringstream msg;
    msg << source << ": cov asymmetric by " << asym << ", symmetrized";
    warnings.push_back(msg.str());
    out.cov = 0.5 * (out.cov + out.cov.transpose());
  }
  return out;
}

MatrixDocument load_matrix_document(const std::string& path, std::vector<std::string>& warnings) {
  return parse_matrix_document(read_json_file(path), path, warnings);
}

GaussianLaw to_law(const MatrixDocument& doc, double psd_tol) {
  try {
    return GaussianLaw(doc.mean, PsdMatrix(doc.cov, psd_tol));
  } catch (const Error& e) {
    throw InputError((doc.label.empty() ? std::string("input") : doc.label) + ": " + e.what());
  }
}

FrameDocument load_frame_document(const std::string& path) {
  const Json doc = read_json_file(path);
  if (!doc.is_object() || !doc.contains("O") || !doc.contains("C"))
    throw InputError(path + ": frame documents need \"O\" and \"C\"");
  FrameDocument out{matrix_from_json(doc["O"], path + ": O"), matrix_from_json(doc["C"], path + ": C")};
  if (out.o.rows() != out.o.cols() || out.c.rows() != out.c.cols() || out.o.rows() != out.c.rows())
    throw InputError(path + ": O and C must be square of the same size");
  return out;
}

Json to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json to_json(const Vector& v) {
  Json out = Json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Json result_document(const std::string& command, Json inputs, Json outputs) {
  return Json{{"command", command},
              {"inputs", std::move(inputs)},
              {"outputs", std::move(outputs)},
              {"versions", {{"tool", kToolVersion}, {"format", kFormatVersion}}}};
}

std::string canonical_dump(const Json& doc) { return doc.dump(2) + "\n"; }

}  // namespace gaussot::cli
