#include "oadmm/data.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "oadmm/rng.hpp"

namespace oadmm {

namespace {

std::ifstream open_or_throw(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FileNotFoundError("cannot open '" + path + "'");
  return in;
}

double parse_double(const std::string& token, const std::string& path) {
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(token, &used);
  } catch (const std::exception&) {
    throw ParseError(path + ": bad numeric literal '" + token + "'");
  }
  if (used != token.size()) throw ParseError(path + ": trailing junk in '" + token + "'");
  return value;
}

}  // namespace

Eigen::MatrixXd read_csv(const std::string& path) {
  std::ifstream in = open_or_throw(path);
  std::string line;
  if (!std::getline(in, line)) throw ParseError(path + ": empty file");
  std::istringstream header(line);
  std::string tok;
  Eigen::Index rows = 0, cols = 0;
  if (!std::getline(header, tok, ',')) throw ParseError(path + ": bad header");
  rows = static_cast<Eigen::Index>(parse_double(tok, path));
  if (!std::getline(header, tok, ',')) throw ParseError(path + ": bad header");
  cols = static_cast<Eigen::Index>(parse_double(tok, path));
  if (rows < 1 || cols < 1) throw ParseError(path + ": non-positive dimensions");

  Eigen::MatrixXd out(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    if (!std::getline(in, line)) throw ParseError(path + ": truncated at row " + std::to_string(i));
    std::istringstream row(line);
    for (Eigen::Index j = 0; j < cols; ++j) {
      if (!std::getline(row, tok, ',')) {
        throw ParseError(path + ": row " + std::to_string(i) + " has fewer than " +
                         std::to_string(cols) + " fields");
      }
      out(i, j) = parse_double(tok, path);
    }
  }
  return out;
}

void write_csv(const std::string& path, const Eigen::MatrixXd& m) {
  std::ofstream out(path);
  if (!out) throw FileNotFoundError("cannot write '" + path + "'");
  out << m.rows() << "," << m.cols() << "\n";
  char buf[40];
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", m(i, j));
      out << buf << (j + 1 < m.cols() ? "," : "");
    }
    out << "\n";
  }
}

Eigen::MatrixXd read_matrix_market(const std::string& path) {
  std::ifstream in = open_or_throw(path);
  std::string line;
  if (!std::getline(in, line)) throw ParseError(path + ": empty file");
  if (line.rfind("%%MatrixMarket", 0) != 0 ||
      line.find("coordinate") == std::string::npos ||
      line.find("real") == std::string::npos ||
      line.find("general") == std::string::npos) {
    throw ParseError(path + ": only 'matrix coordinate real general' is accepted");
  }
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] != '%') break;
  }
  std::istringstream sizes(line);
  Eigen::Index rows = 0, cols = 0;
  long long nnz = 0;
  if (!(sizes >> rows >> cols >> nnz)) throw ParseError(path + ": bad size line");
  if (rows < 1 || cols < 1 || nnz < 0) throw ParseError(path + ": bad dimensions");
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(rows, cols);
  for (long long e = 0; e < nnz; ++e) {
    Eigen::Index i = 0, j = 0;
    double v = 0.0;
    if (!(in >> i >> j >> v)) throw ParseError(path + ": truncated entry list");
    if (i < 1 || i > rows || j < 1 || j > cols) {
      throw ParseError(path + ": entry index out of range");
    }
    out(i - 1, j - 1) = v;  // 1-based indices
  }
  return out;
}

Eigen::MatrixXd synth_randn(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  if (rows < 1 || cols < 1) throw EmptyDataError("synth_randn: dims must be >= 1");
  GaussianSampler rng(seed);
  return rng.matrix(rows, cols);
}

void prepare_columns(Eigen::MatrixXd& d, bool literal_ones_centering) {
  if (d.size() == 0) throw EmptyDataError("prepare_columns: empty matrix");
  for (Eigen::Index j = 0; j < d.cols(); ++j) {
    const double norm = d.col(j).norm();
    if (norm <= 0.0) {
      throw DegenerateColumnError("column " + std::to_string(j) + " is zero");
    }
    d.col(j) /= norm;
    if (literal_ones_centering) {
      d.col(j).array() -= d.col(j).sum();
    } else {
      d.col(j).array() -= d.col(j).mean();
    }
  }
}

DatasetDescriptor DatasetDescriptor::parse(const std::string& text) {
  DatasetDescriptor out;
  if (text.rfind("file:", 0) == 0) {
    out.kind = Kind::File;
    out.path = text.substr(5);
    if (out.path.empty()) throw ParseError("dataset descriptor 'file:' needs a path");
    return out;
  }
  if (text.rfind("randn-", 0) != 0) {
    throw ParseError("dataset descriptor '" + text +
                     "' matches neither file:<path> nor randn-<rows>-<cols>[:seed=<u64>]");
  }
  std::string body = text.substr(6);
  const auto colon = body.find(':');
  std::string dims = body.substr(0, colon);
  const auto dash = dims.find('-');
  if (dash == std::string::npos) throw ParseError("randn descriptor needs <rows>-<cols>");
  try {
    out.rows = std::stoll(dims.substr(0, dash));
    out.cols = std::stoll(dims.substr(dash + 1));
  } catch (const std::exception&) {
    throw ParseError("randn descriptor has non-numeric dimensions: '" + text + "'");
  }
  if (out.rows < 1 || out.cols < 1) throw ParseError("randn dimensions must be positive");
  if (colon != std::string::npos) {
    std::string opt = body.substr(colon + 1);
    if (opt.rfind("seed=", 0) != 0) throw ParseError("expected ':seed=<u64>' in '" + text + "'");
    try {
      out.seed = std::stoull(opt.substr(5));
    } catch (const std::exception&) {
      throw ParseError("bad seed in '" + text + "'");
    }
    out.has_seed = true;
  }
  return out;
}

Eigen::MatrixXd load_or_synthesize_data(const std::string& descriptor,
                                        std::uint64_t default_seed,
                                        bool literal_ones_centering) {
  const DatasetDescriptor desc = DatasetDescriptor::parse(descriptor);
  Eigen::MatrixXd d;
  if (desc.kind == DatasetDescriptor::Kind::File) {
    std::ifstream probe = open_or_throw(desc.path);
    std::string first;
    std::getline(probe, first);
    probe.close();
    d = (first.rfind("%%MatrixMarket", 0) == 0) ? read_matrix_market(desc.path)
                                                : read_csv(desc.path);
  } else {
    d = synth_randn(desc.rows, desc.cols, desc.has_seed ? desc.seed : default_seed);
  }
  prepare_columns(d, literal_ones_centering);
  return d;
}

}  // namespace oadmm
