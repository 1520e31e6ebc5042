#include "edfd/pgm.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "edfd/error.hpp"

namespace edfd {

namespace {

class HeaderReader {
 public:
  explicit HeaderReader(std::string_view bytes) : bytes_(bytes) {}

  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      const char c = bytes_[pos_];
      if (c == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n' && bytes_[pos_] != '\r') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  /// Reads an unsigned decimal token; `what` names it in error messages.
  std::size_t number(const char* what, ErrorCode on_missing) {
    skip_space_and_comments();
    if (pos_ >= bytes_.size()) throw Error(on_missing, std::string("missing ") + what);
    if (!std::isdigit(static_cast<unsigned char>(bytes_[pos_]))) {
      throw Error(ErrorCode::MalformedHeader, std::string("expected ") + what);
    }
    std::size_t value = 0;
    while (pos_ < bytes_.size() && std::isdigit(static_cast<unsigned char>(bytes_[pos_]))) {
      value = value * 10 + static_cast<std::size_t>(bytes_[pos_] - '0');
      if (value > (1u << 30)) throw Error(ErrorCode::MalformedHeader, std::string(what) + " too large");
      ++pos_;
    }
    return value;
  }

  std::size_t& pos() { return pos_; }

 private:
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

GrayImage parse_pgm(std::string_view bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '2' && bytes[1] != '5')) {
    throw Error(ErrorCode::MalformedHeader, "not a P2 or P5 PGM file");
  }
  const bool binary = bytes[1] == '5';
  HeaderReader r(bytes.substr(2));
  if (bytes.size() > 2 && !std::isspace(static_cast<unsigned char>(bytes[2])) && bytes[2] != '#') {
    throw Error(ErrorCode::MalformedHeader, "magic number must be followed by whitespace");
  }
  GrayImage img;
  img.width = r.number("width", ErrorCode::MalformedHeader);
  img.height = r.number("height", ErrorCode::MalformedHeader);
  const std::size_t maxval = r.number("maxval", ErrorCode::MalformedHeader);
  if (img.width == 0 || img.height == 0) {
    throw Error(ErrorCode::MalformedHeader, "image dimensions must be positive");
  }
  if (maxval != 255) {
    throw Error(ErrorCode::MalformedHeader, "only maxval 255 is supported");
  }
  const std::size_t count = img.width * img.height;
  img.pixels.resize(count);
  std::string_view rest = bytes.substr(2);
  if (binary) {
    // Exactly one whitespace byte separates maxval from the raster.
    std::size_t p = r.pos();
    if (p >= rest.size() || !std::isspace(static_cast<unsigned char>(rest[p]))) {
      throw Error(ErrorCode::TruncatedData, "missing raster data");
    }
    ++p;
    if (rest.size() - p < count) {
      std::ostringstream msg;
      msg << "raster holds " << rest.size() - p << " bytes, expected " << count;
      throw Error(ErrorCode::TruncatedData, msg.str());
    }
    for (std::size_t i = 0; i < count; ++i) img.pixels[i] = static_cast<std::uint8_t>(rest[p + i]);
  } else {
    for (std::size_t i = 0; i < count; ++i) {
      const std::size_t v = r.number("pixel value", ErrorCode::TruncatedData);
      if (v > maxval) throw Error(ErrorCode::MalformedHeader, "pixel value exceeds maxval");
      img.pixels[i] = static_cast<std::uint8_t>(v);
    }
  }
  return img;
}

GrayImage load_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open image '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_pgm(ss.str());
}

std::string encode_pgm(const GrayImage& image, bool binary) {
  if (image.pixels.size() != image.width * image.height) {
    throw Error(ErrorCode::InvalidArgument, "pixel count does not match width * height");
  }
  std::ostringstream out;
  out << (binary ? "P5" : "P2") << "\n" << image.width << " " << image.height << "\n255\n";
  if (binary) {
    out.write(reinterpret_cast<const char*>(image.pixels.data()),
              static_cast<std::streamsize>(image.pixels.size()));
  } else {
    for (std::size_t r = 0; r < image.height; ++r) {
      for (std::size_t c = 0; c < image.width; ++c) {
        out << (c ? " " : "") << static_cast<int>(image.pixels[r * image.width + c]);
      }
      out << "\n";
    }
  }
  return out.str();
}

void save_pgm(const GrayImage& image, const std::string& path, bool binary) {
  const std::string data = encode_pgm(image, binary);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write image '" + path + "'");
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!out) throw Error(ErrorCode::IoError, "failed writing image '" + path + "'");
}

TorusGrid image_grid(const GrayImage& image) {
  const double h = 1.0 / static_cast<double>(std::max(image.width, image.height));
  return TorusGrid({image.height, image.width}, h);
}

Field image_to_field(const GrayImage& image, double floor) {
  if (!(floor > 0.0 && floor < 0.5)) {
    throw Error(ErrorCode::InvalidArgument, "image floor must lie in (0, 0.5)");
  }
  Field u(image.pixels.size());
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = std::max(floor, image.pixels[i] / 255.0);
  return u;
}

GrayImage field_to_image(std::span<const double> u, std::size_t width, std::size_t height) {
  if (u.size() != width * height) {
    throw Error(ErrorCode::InvalidArgument, "field size does not match width * height");
  }
  GrayImage img{width, height, std::vector<std::uint8_t>(u.size())};
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double x = std::clamp(u[i], 0.0, 1.0);
    img.pixels[i] = static_cast<std::uint8_t>(std::lround(255.0 * x));
  }
  return img;
}

}  // namespace edfd
