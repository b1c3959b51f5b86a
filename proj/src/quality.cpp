#include "dnaskew/quality.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dnaskew/kernels.hpp"

namespace dnaskew {

double psnr(const Image& a, const Image& b) {
  if (!a.same_shape(b) || a.pixels.size() != b.pixels.size()) {
    throw std::invalid_argument("psnr needs images of equal dimensions and channel count");
  }
  if (a.pixels.empty()) throw std::invalid_argument("psnr of empty images");
  const std::uint64_t sse =
      kernels::active().sum_sq_diff_u8(a.pixels.data(), b.pixels.data(), a.pixels.size());
  if (sse == 0) return std::numeric_limits<double>::infinity();
  const double mse = static_cast<double>(sse) / static_cast<double>(a.pixels.size());
  return 10.0 * std::log10(255.0 * 255.0 / mse);
}

QualityEvaluator::QualityEvaluator(std::vector<std::uint8_t> original, double ref_db)
    : bytes_(std::move(original)), ref_db_(ref_db) {
  auto img = decode_jpeg(bytes_);
  if (!img) throw std::invalid_argument("reference JPEG does not decode");
  image_ = std::move(*img);
}

QualityResult QualityEvaluator::operator()(std::span<const std::uint8_t> retrieved) const {
  if (retrieved.size() == bytes_.size() && std::equal(retrieved.begin(), retrieved.end(), bytes_.begin())) {
    return {};
  }
  const auto img = decode_jpeg(retrieved);
  if (!img || !img->same_shape(image_)) return QualityResult::undecodable_result();
  QualityResult r;
  r.psnr_db = psnr(image_, *img);
  r.loss_db = std::isinf(r.psnr_db) ? 0.0 : std::max(0.0, ref_db_ - r.psnr_db);
  return r;
}

QualityResult quality_loss(std::span<const std::uint8_t> original,
                           std::span<const std::uint8_t> retrieved, double ref_db) {
  return QualityEvaluator(std::vector<std::uint8_t>(original.begin(), original.end()), ref_db)(retrieved);
}

}  // namespace dnaskew
