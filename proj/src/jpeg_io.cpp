#include "dnaskew/jpeg.hpp"

#include <algorithm>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <cstdlib>
#include <memory>
#include <random>
#include <stdexcept>

#include <jpeglib.h>

namespace dnaskew {

namespace {

struct ErrorManager {
  jpeg_error_mgr base;
  std::jmp_buf jump;
};

[[noreturn]] void on_error(j_common_ptr cinfo) {
  auto* err = reinterpret_cast<ErrorManager*>(cinfo->err);
  std::longjmp(err->jump, 1);
}

void on_message(j_common_ptr, int) {}
void on_output(j_common_ptr) {}

void install(ErrorManager& err) {
  jpeg_std_error(&err.base);
  err.base.error_exit = on_error;
  err.base.emit_message = on_message;
  err.base.output_message = on_output;
}

}  // namespace

std::optional<Image> decode_jpeg(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4) return std::nullopt;
  jpeg_decompress_struct cinfo{};
  ErrorManager err;
  install(err);
  cinfo.err = &err.base;
  // Heap state so nothing the error path reads lives in a register.
  auto result = std::make_unique<Image>();
  auto started = std::make_unique<bool>(false);
  if (setjmp(err.jump)) {
    jpeg_destroy_decompress(&cinfo);
    // Once the frame size is known, keep what was decoded (the rest stays
    // mid-gray, as libjpeg does for a premature end of data).
    if (*started) return std::move(*result);
    return std::nullopt;
  }
  jpeg_create_decompress(&cinfo);
  jpeg_mem_src(&cinfo, bytes.data(), static_cast<unsigned long>(bytes.size()));
  jpeg_read_header(&cinfo, TRUE);
  if (cinfo.num_components != 1) cinfo.out_color_space = JCS_RGB;
  jpeg_start_decompress(&cinfo);
  result->width = static_cast<int>(cinfo.output_width);
  result->height = static_cast<int>(cinfo.output_height);
  result->components = cinfo.output_components;
  const std::size_t stride = static_cast<std::size_t>(result->width) * result->components;
  result->pixels.assign(stride * result->height, 128);
  *started = true;
  while (cinfo.output_scanline < cinfo.output_height) {
    JSAMPROW row = result->pixels.data() + stride * cinfo.output_scanline;
    jpeg_read_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_decompress(&cinfo);
  jpeg_destroy_decompress(&cinfo);
  return std::move(*result);
}

std::vector<std::uint8_t> encode_jpeg(const Image& image, int quality) {
  if (image.components != 1 && image.components != 3) {
    throw std::invalid_argument("JPEG encoding needs 1 or 3 components");
  }
  if (image.width < 1 || image.height < 1 ||
      image.pixels.size() != static_cast<std::size_t>(image.width) * image.height * image.components) {
    throw std::invalid_argument("image buffer does not match its dimensions");
  }
  jpeg_compress_struct cinfo{};
  ErrorManager err;
  install(err);
  cinfo.err = &err.base;
  // Read again after a longjmp, so keep them out of registers.
  static thread_local unsigned char* buffer;
  static thread_local unsigned long size;
  buffer = nullptr;
  size = 0;
  if (setjmp(err.jump)) {
    jpeg_destroy_compress(&cinfo);
    std::free(buffer);
    throw std::runtime_error("JPEG encoder failed");
  }
  jpeg_create_compress(&cinfo);
  jpeg_mem_dest(&cinfo, &buffer, &size);
  cinfo.image_width = static_cast<JDIMENSION>(image.width);
  cinfo.image_height = static_cast<JDIMENSION>(image.height);
  cinfo.input_components = image.components;
  cinfo.in_color_space = image.components == 1 ? JCS_GRAYSCALE : JCS_RGB;
  jpeg_set_defaults(&cinfo);
  jpeg_set_quality(&cinfo, quality, TRUE);
  jpeg_start_compress(&cinfo, TRUE);
  const std::size_t stride = static_cast<std::size_t>(image.width) * image.components;
  while (cinfo.next_scanline < cinfo.image_height) {
    auto* row = const_cast<JSAMPROW>(image.pixels.data() + stride * cinfo.next_scanline);
    jpeg_write_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_compress(&cinfo);
  jpeg_destroy_compress(&cinfo);
  std::vector<std::uint8_t> out(buffer, buffer + size);
  std::free(buffer);
  return out;
}

Image synthetic_image(int width, int height, int components, std::uint64_t seed) {
  Image img;
  img.width = width;
  img.height = height;
  img.components = components;
  img.pixels.resize(static_cast<std::size_t>(width) * height * components);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> phase(0.0, 6.283185307179586);
  std::normal_distribution<double> noise(0.0, 6.0);
  double ph[3][2];
  for (auto& p : ph) {
    p[0] = phase(rng);
    p[1] = phase(rng);
  }
  std::size_t i = 0;
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      for (int c = 0; c < components; ++c) {
        const double fx = (2.0 + c) * 6.283185307179586 * x / width;
        const double fy = (1.5 + 0.5 * c) * 6.283185307179586 * y / height;
        double v = 128.0 + 60.0 * std::sin(fx + ph[c][0]) * std::cos(fy + ph[c][1]) +
                   30.0 * std::sin(0.05 * (x + 2 * y) + ph[c][1]) + noise(rng);
        if ((x / 8 + y / 8) % 5 == 0) v += 25.0;
        img.pixels[i++] = static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 255.0)));
      }
    }
  }
  return img;
}

}  // namespace dnaskew
