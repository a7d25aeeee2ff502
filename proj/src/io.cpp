#include "defrost/io.hpp"

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

static_assert(std::endian::native == std::endian::little,
              "binary containers are written in little-endian layout");

namespace defrost {
namespace {

class BinaryReader {
 public:
  BinaryReader(const std::string& path, const char* format)
      : path_(path), format_(format), in_(path, std::ios::binary) {
    if (!in_) throw std::runtime_error(std::string(format) + ": cannot open " + path);
  }

  void read_raw(void* dst, std::size_t bytes) {
    in_.read(static_cast<char*>(dst), static_cast<std::streamsize>(bytes));
    if (in_.gcount() != static_cast<std::streamsize>(bytes))
      throw std::runtime_error(std::string(format_) + ": truncated file " + path_ +
                               " at byte offset " + std::to_string(offset_ + in_.gcount()));
    offset_ += bytes;
  }

  std::uint32_t read_u32() {
    std::uint32_t v;
    read_raw(&v, sizeof v);
    return v;
  }

  void expect_magic(const char* magic) {
    char found[5] = {0, 0, 0, 0, 0};
    read_raw(found, 4);
    if (std::memcmp(found, magic, 4) != 0)
      throw std::runtime_error(std::string(format_) + ": bad magic in " + path_ + ", expected \"" +
                               magic + "\", found \"" + found + "\"");
  }

 private:
  std::string path_;
  const char* format_;
  std::ifstream in_;
  std::size_t offset_ = 0;
};

std::ofstream open_out(const std::string& path, const char* what, bool binary = true) {
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) throw std::runtime_error(std::string(what) + ": cannot open " + path + " for writing");
  return out;
}

void write_raw(std::ofstream& out, const void* src, std::size_t bytes, const std::string& path) {
  out.write(static_cast<const char*>(src), static_cast<std::streamsize>(bytes));
  if (!out) throw std::runtime_error("write failed: " + path);
}

void write_u32(std::ofstream& out, std::uint32_t v, const std::string& path) {
  write_raw(out, &v, sizeof v, path);
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

void write_dataset_dfl1(const LabeledDataset& dataset, const std::string& path) {
  auto out = open_out(path, "DFL1");
  write_raw(out, "DFL1", 4, path);
  write_u32(out, static_cast<std::uint32_t>(dataset.size()), path);
  write_u32(out, static_cast<std::uint32_t>(dataset.dim()), path);
  write_u32(out, static_cast<std::uint32_t>(dataset.num_classes), path);
  write_raw(out, dataset.features.data(), dataset.features.size() * sizeof(double), path);
  for (int label : dataset.labels) write_u32(out, static_cast<std::uint32_t>(label), path);
}

LabeledDataset read_dataset_dfl1(const std::string& path) {
  BinaryReader in(path, "DFL1");
  in.expect_magic("DFL1");
  const std::uint32_t n = in.read_u32();
  const std::uint32_t d = in.read_u32();
  const std::uint32_t c = in.read_u32();
  LabeledDataset dataset;
  dataset.num_classes = static_cast<int>(c);
  dataset.features = Matrix(n, d);
  in.read_raw(dataset.features.data(), static_cast<std::size_t>(n) * d * sizeof(double));
  dataset.labels.resize(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    const std::uint32_t label = in.read_u32();
    if (label >= c)
      throw std::runtime_error("DFL1: label " + std::to_string(label) + " at row " +
                               std::to_string(i) + " exceeds class count " + std::to_string(c));
    dataset.labels[i] = static_cast<int>(label);
  }
  return dataset;
}

void write_dataset_csv(const LabeledDataset& dataset, const std::string& path) {
  auto out = open_out(path, "dataset CSV", false);
  for (std::size_t j = 0; j < dataset.dim(); ++j) out << 'f' << j << ',';
  out << "label\n";
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const double* row = dataset.features.row_ptr(i);
    for (std::size_t j = 0; j < dataset.dim(); ++j) out << format_double(row[j]) << ',';
    out << dataset.labels[i] << '\n';
  }
  if (!out) throw std::runtime_error("dataset CSV: write failed: " + path);
}

LabeledDataset read_dataset_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("dataset CSV: cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("dataset CSV: empty file " + path);
  std::size_t d = 0;
  {
    std::stringstream header(line);
    std::string token;
    std::vector<std::string> tokens;
    while (std::getline(header, token, ',')) tokens.push_back(token);
    if (tokens.empty() || tokens.back() != "label")
      throw std::runtime_error("dataset CSV: header must end with 'label' in " + path);
    d = tokens.size() - 1;
  }
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  int max_label = 0;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string token;
    std::vector<double> row;
    while (std::getline(ss, token, ',')) {
      char* end = nullptr;
      row.push_back(std::strtod(token.c_str(), &end));
      if (end == token.c_str())
        throw std::runtime_error("dataset CSV: unparseable value '" + token + "' on line " +
                                 std::to_string(line_no));
    }
    if (row.size() != d + 1)
      throw std::runtime_error("dataset CSV: expected " + std::to_string(d + 1) + " fields, got " +
                               std::to_string(row.size()) + " on line " + std::to_string(line_no));
    labels.push_back(static_cast<int>(row.back()));
    max_label = std::max(max_label, labels.back());
    row.pop_back();
    rows.push_back(std::move(row));
  }
  LabeledDataset dataset;
  dataset.features = Matrix::from_rows(rows);
  dataset.labels = std::move(labels);
  dataset.num_classes = max_label + 1;
  return dataset;
}

void write_params_dfw1(const ParamSet& params, const std::string& path) {
  auto out = open_out(path, "DFW1");
  write_raw(out, "DFW1", 4, path);
  write_u32(out, static_cast<std::uint32_t>(params.layers.size()), path);
  for (const auto& layer : params.layers) {
    write_u32(out, static_cast<std::uint32_t>(layer.weights.rows()), path);
    write_u32(out, static_cast<std::uint32_t>(layer.weights.cols()), path);
    write_raw(out, layer.weights.data(), layer.weights.size() * sizeof(double), path);
    write_raw(out, layer.biases.data(), layer.biases.size() * sizeof(double), path);
  }
}

ParamSet read_params_dfw1(const std::string& path) {
  BinaryReader in(path, "DFW1");
  in.expect_magic("DFW1");
  const std::uint32_t count = in.read_u32();
  ParamSet params;
  params.layers.resize(count);
  for (std::uint32_t l = 0; l < count; ++l) {
    const std::uint32_t rows = in.read_u32();
    const std::uint32_t cols = in.read_u32();
    params.layers[l].weights = Matrix(rows, cols);
    in.read_raw(params.layers[l].weights.data(), static_cast<std::size_t>(rows) * cols * sizeof(double));
    params.layers[l].biases.resize(cols);
    in.read_raw(params.layers[l].biases.data(), cols * sizeof(double));
  }
  return params;
}

void write_representation(const Matrix& rep, const std::string& path) {
  LabeledDataset container;
  container.features = rep;
  container.labels.assign(rep.rows(), 0);
  container.num_classes = 1;
  write_dataset_dfl1(container, path);
}

Matrix read_representation(const std::string& path) { return read_dataset_dfl1(path).features; }

void write_history_csv(const std::vector<EpochStats>& history, const std::string& path) {
  auto out = open_out(path, "history CSV", false);
  out << "epoch,lr,train_loss,train_acc\n";
  for (const auto& e : history)
    out << e.epoch << ',' << format_double(e.lr) << ',' << format_double(e.loss) << ','
        << format_double(e.accuracy) << '\n';
  if (!out) throw std::runtime_error("history CSV: write failed: " + path);
}

void write_profile_csv(const DefrostingProfile& profile, const std::string& path) {
  auto out = open_out(path, "profile CSV", false);
  out << "cut,mean_acc,std_acc,n_seeds\n";
  for (const auto& e : profile.entries)
    out << e.cut << ',' << format_double(e.mean_accuracy) << ',' << format_double(e.std_accuracy)
        << ',' << e.seed_count << '\n';
  if (!out) throw std::runtime_error("profile CSV: write failed: " + path);
}

void write_compliant_csv(const CompliantSweepResult& sweep, const std::string& path) {
  auto out = open_out(path, "compliant CSV", false);
  out << "lambda,mean_acc,std_acc,cos_dist\n";
  for (const auto& p : sweep.points)
    out << format_double(p.lambda) << ',' << format_double(p.mean_accuracy) << ','
        << format_double(p.std_accuracy) << ',' << format_double(p.cosine_dist) << '\n';
  if (!out) throw std::runtime_error("compliant CSV: write failed: " + path);
}

void write_curves_csv(const std::vector<SimilarityCurve>& curves, const std::string& path) {
  auto out = open_out(path, "curve CSV", false);
  out << "layer,metric,value\n";
  for (const auto& curve : curves)
    for (const auto& p : curve.points)
      out << p.layer << ',' << p.metric << ',' << format_double(p.value) << '\n';
  if (!out) throw std::runtime_error("curve CSV: write failed: " + path);
}

}  // namespace defrost
