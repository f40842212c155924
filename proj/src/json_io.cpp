#include "phasor/json_io.hpp"

#include <fstream>
#include <sstream>

namespace phasor {

nlohmann::json toJson(const PhasorArray& a) {
  nlohmann::json coeffs = nlohmann::json::array();
  for (int k = -a.order(); k <= a.order(); ++k) {
    const auto s = a.slice(k);
    for (Index i = 0; i < a.rows(); ++i) {
      for (Index j = 0; j < a.cols(); ++j) {
        coeffs.push_back({s(i, j).real(), s(i, j).imag()});
      }
    }
  }
  return {{"rows", a.rows()}, {"cols", a.cols()}, {"h", a.order()},
          {"real", a.isReal()}, {"coeffs", std::move(coeffs)}};
}

PhasorArray phasorFromJson(const nlohmann::json& doc) {
  try {
    if (!doc.is_object()) throw ValidationError("PhasorArray document must be an object");
    const auto rows = doc.at("rows").get<Index>();
    const auto cols = doc.at("cols").get<Index>();
    const int h = doc.at("h").get<int>();
    const bool real = doc.value("real", false);
    const auto& coeffs = doc.at("coeffs");
    if (rows < 1 || cols < 1 || h < 0) throw ValidationError("invalid PhasorArray shape");
    if (!coeffs.is_array() ||
        static_cast<Index>(coeffs.size()) != rows * cols * (2 * h + 1)) {
      throw ValidationError("coefficient count does not equal rows*cols*(2h+1)");
    }
    std::vector<Complex> data(coeffs.size());
    std::size_t n = 0;
    for (int k = -h; k <= h; ++k) {
      for (Index i = 0; i < rows; ++i) {
        for (Index j = 0; j < cols; ++j, ++n) {
          const auto& c = coeffs[n];
          if (!c.is_array() || c.size() != 2) {
            throw ValidationError("each coefficient must be a [re, im] pair");
          }
          data[static_cast<std::size_t>((k + h) * rows * cols + j * rows + i)] =
              Complex(c[0].get<double>(), c[1].get<double>());
        }
      }
    }
    return PhasorArray(rows, cols, h, std::move(data), real);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed PhasorArray document: ") + e.what());
  }
}

std::string serialize(const PhasorArray& a) { return toJson(a).dump(); }

PhasorArray deserialize(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed JSON: ") + e.what());
  }
  return phasorFromJson(doc);
}

std::string readTextFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void writeTextFile(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

PhasorArray readPhasorFile(const std::filesystem::path& path) {
  return deserialize(readTextFile(path));
}

void writePhasorFile(const std::filesystem::path& path, const PhasorArray& a) {
  writeTextFile(path, toJson(a).dump(2) + "\n");
}

}  // namespace phasor
