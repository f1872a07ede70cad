#include <zlib.h>

#include <algorithm>
#include <array>
#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "ocp/error.h"
#include "ocp/evaluate.h"

namespace ocp {

namespace {

// 5x7 glyphs, one byte per row, bit 4 is the leftmost pixel.
struct Glyph {
  char c;
  std::array<uint8_t, 7> rows;
};

constexpr Glyph kFont[] = {
    {'0', {0x0E, 0x11, 0x13, 0x15, 0x19, 0x11, 0x0E}},
    {'1', {0x04, 0x0C, 0x04, 0x04, 0x04, 0x04, 0x0E}},
    {'2', {0x0E, 0x11, 0x01, 0x02, 0x04, 0x08, 0x1F}},
    {'3', {0x1F, 0x02, 0x04, 0x02, 0x01, 0x11, 0x0E}},
    {'4', {0x02, 0x06, 0x0A, 0x12, 0x1F, 0x02, 0x02}},
    {'5', {0x1F, 0x10, 0x1E, 0x01, 0x01, 0x11, 0x0E}},
    {'6', {0x06, 0x08, 0x10, 0x1E, 0x11, 0x11, 0x0E}},
    {'7', {0x1F, 0x01, 0x02, 0x04, 0x08, 0x08, 0x08}},
    {'8', {0x0E, 0x11, 0x11, 0x0E, 0x11, 0x11, 0x0E}},
    {'9', {0x0E, 0x11, 0x11, 0x0F, 0x01, 0x02, 0x0C}},
    {'A', {0x0E, 0x11, 0x11, 0x1F, 0x11, 0x11, 0x11}},
    {'B', {0x1E, 0x11, 0x11, 0x1E, 0x11, 0x11, 0x1E}},
    {'C', {0x0E, 0x11, 0x10, 0x10, 0x10, 0x11, 0x0E}},
    {'D', {0x1C, 0x12, 0x11, 0x11, 0x11, 0x12, 0x1C}},
    {'E', {0x1F, 0x10, 0x10, 0x1E, 0x10, 0x10, 0x1F}},
    {'F', {0x1F, 0x10, 0x10, 0x1E, 0x10, 0x10, 0x10}},
    {'G', {0x0E, 0x11, 0x10, 0x17, 0x11, 0x11, 0x0F}},
    {'H', {0x11, 0x11, 0x11, 0x1F, 0x11, 0x11, 0x11}},
    {'I', {0x0E, 0x04, 0x04, 0x04, 0x04, 0x04, 0x0E}},
    {'J', {0x07, 0x02, 0x02, 0x02, 0x02, 0x12, 0x0C}},
    {'K', {0x11, 0x12, 0x14, 0x18, 0x14, 0x12, 0x11}},
    {'L', {0x10, 0x10, 0x10, 0x10, 0x10, 0x10, 0x1F}},
    {'M', {0x11, 0x1B, 0x15, 0x15, 0x11, 0x11, 0x11}},
    {'N', {0x11, 0x11, 0x19, 0x15, 0x13, 0x11, 0x11}},
    {'O', {0x0E, 0x11, 0x11, 0x11, 0x11, 0x11, 0x0E}},
    {'P', {0x1E, 0x11, 0x11, 0x1E, 0x10, 0x10, 0x10}},
    {'Q', {0x0E, 0x11, 0x11, 0x11, 0x15, 0x12, 0x0D}},
    {'R', {0x1E, 0x11, 0x11, 0x1E, 0x14, 0x12, 0x11}},
    {'S', {0x0F, 0x10, 0x10, 0x0E, 0x01, 0x01, 0x1E}},
    {'T', {0x1F, 0x04, 0x04, 0x04, 0x04, 0x04, 0x04}},
    {'U', {0x11, 0x11, 0x11, 0x11, 0x11, 0x11, 0x0E}},
    {'V', {0x11, 0x11, 0x11, 0x11, 0x11, 0x0A, 0x04}},
    {'W', {0x11, 0x11, 0x11, 0x15, 0x15, 0x15, 0x0A}},
    {'X', {0x11, 0x11, 0x0A, 0x04, 0x0A, 0x11, 0x11}},
    {'Y', {0x11, 0x11, 0x11, 0x0A, 0x04, 0x04, 0x04}},
    {'Z', {0x1F, 0x01, 0x02, 0x04, 0x08, 0x10, 0x1F}},
};

struct Rgb {
  uint8_t r, g, b;
};

class Canvas {
 public:
  Canvas(int width, int height)
      : width_(width), height_(height), pixels_(width * height, Rgb{255, 255, 255}) {}

  void fill(int x0, int y0, int w, int h, Rgb color) {
    for (int y = std::max(0, y0); y < std::min(height_, y0 + h); ++y) {
      for (int x = std::max(0, x0); x < std::min(width_, x0 + w); ++x) {
        pixels_[y * width_ + x] = color;
      }
    }
  }

  // Draws upper-case text at `scale`; unknown characters render as blanks.
  void text(int x, int y, const std::string& s, int scale, Rgb color) {
    for (char c : s) {
      for (const Glyph& g : kFont) {
        if (g.c != c) continue;
        for (int row = 0; row < 7; ++row) {
          for (int col = 0; col < 5; ++col) {
            if (g.rows[row] & (0x10 >> col)) {
              fill(x + col * scale, y + row * scale, scale, scale, color);
            }
          }
        }
      }
      x += 6 * scale;
    }
  }

  static int text_width(const std::string& s, int scale) {
    return s.empty() ? 0 : static_cast<int>(s.size()) * 6 * scale - scale;
  }

  void write_png(const std::filesystem::path& path) const {
    std::vector<uint8_t> raw;
    raw.reserve(static_cast<size_t>(height_) * (1 + 3 * width_));
    for (int y = 0; y < height_; ++y) {
      raw.push_back(0);  // filter: none
      for (int x = 0; x < width_; ++x) {
        const Rgb& p = pixels_[y * width_ + x];
        raw.push_back(p.r);
        raw.push_back(p.g);
        raw.push_back(p.b);
      }
    }
    uLongf packed_size = compressBound(raw.size());
    std::vector<uint8_t> packed(packed_size);
    if (compress2(packed.data(), &packed_size, raw.data(), raw.size(), 9) != Z_OK) {
      throw Error(ErrorCode::kIoFailure, "zlib compression failed");
    }
    packed.resize(packed_size);

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIoFailure, "cannot write " + path.string());
    static constexpr uint8_t kSignature[] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1A, '\n'};
    out.write(reinterpret_cast<const char*>(kSignature), sizeof(kSignature));
    std::vector<uint8_t> ihdr;
    put_u32(ihdr, width_);
    put_u32(ihdr, height_);
    ihdr.insert(ihdr.end(), {8, 2, 0, 0, 0});  // 8-bit RGB
    write_chunk(out, "IHDR", ihdr);
    write_chunk(out, "IDAT", packed);
    write_chunk(out, "IEND", {});
    if (!out) throw Error(ErrorCode::kIoFailure, "write failed: " + path.string());
  }

 private:
  static void put_u32(std::vector<uint8_t>& buf, uint32_t v) {
    buf.push_back(v >> 24);
    buf.push_back((v >> 16) & 0xFF);
    buf.push_back((v >> 8) & 0xFF);
    buf.push_back(v & 0xFF);
  }

  static void write_chunk(std::ofstream& out, const char* type,
                          const std::vector<uint8_t>& data) {
    std::vector<uint8_t> head;
    put_u32(head, static_cast<uint32_t>(data.size()));
    out.write(reinterpret_cast<const char*>(head.data()), 4);
    uLong crc = crc32(0L, reinterpret_cast<const Bytef*>(type), 4);
    if (!data.empty()) crc = crc32(crc, data.data(), data.size());
    out.write(type, 4);
    out.write(reinterpret_cast<const char*>(data.data()), data.size());
    std::vector<uint8_t> tail;
    put_u32(tail, static_cast<uint32_t>(crc));
    out.write(reinterpret_cast<const char*>(tail.data()), 4);
  }

  int width_, height_;
  std::vector<Rgb> pixels_;
};

Rgb shade(double t) {
  auto lerp = [t](int a, int b) {
    return static_cast<uint8_t>(a + (b - a) * t + 0.5);
  };
  return {lerp(247, 8), lerp(251, 48), lerp(255, 107)};
}

}  // namespace

void emit_confusion_figure(const ConfusionMatrix& cm,
                           const std::filesystem::path& stem) {
  const int n = static_cast<int>(cm.label_order.size());
  const int cell = 72, left = 90, top = 70, pad = 16, scale = 2;
  Canvas canvas(left + n * cell + pad, top + n * cell + pad);
  size_t peak = 0;
  for (const auto& row : cm.counts) {
    for (size_t c : row) peak = std::max(peak, c);
  }
  const Rgb black{0, 0, 0}, white{255, 255, 255}, grid{160, 160, 160};
  canvas.text(left, 8, "PREDICTED", scale, black);
  canvas.text(8, top - 24, "TRUE", scale, black);
  for (int i = 0; i < n; ++i) {
    std::string name(to_string(cm.label_order[i]));
    int w = Canvas::text_width(name, scale);
    canvas.text(left + i * cell + (cell - w) / 2, top - 28, name, scale, black);
    canvas.text(8, top + i * cell + (cell - 14) / 2, name, scale, black);
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      size_t count = cm.counts[i][j];
      double t = peak > 0 ? static_cast<double>(count) / static_cast<double>(peak) : 0.0;
      int x = left + j * cell, y = top + i * cell;
      canvas.fill(x, y, cell, cell, grid);
      canvas.fill(x + 1, y + 1, cell - 2, cell - 2, shade(t));
      std::string label = std::to_string(count);
      int w = Canvas::text_width(label, scale);
      canvas.text(x + (cell - w) / 2, y + (cell - 14) / 2, label, scale,
                  t > 0.5 ? white : black);
    }
  }
  std::filesystem::path png = stem;
  png += ".png";
  std::filesystem::path csv = stem;
  csv += ".csv";
  canvas.write_png(png);
  write_confusion_csv(cm, csv);
}

}  // namespace ocp
