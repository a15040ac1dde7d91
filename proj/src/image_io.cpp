#include "leukoseg/image_io.hpp"

#include <opencv2/imgcodecs.hpp>
#include <stdexcept>

namespace leukoseg {

namespace {

cv::Mat load(const std::filesystem::path& path, int flags) {
  cv::Mat m = cv::imread(path.string(), flags);
  if (m.empty()) throw std::runtime_error("cannot read image: " + path.string());
  return m;
}

void store(const std::filesystem::path& path, const cv::Mat& m) {
  bool ok = false;
  try {
    ok = cv::imwrite(path.string(), m);
  } catch (const cv::Exception& e) {
    throw std::runtime_error("cannot write image " + path.string() + ": " + e.what());
  }
  if (!ok) throw std::runtime_error("cannot write image: " + path.string());
}

cv::Mat to_mat(const Grid<std::uint8_t>& img) {
  cv::Mat m(img.height(), img.width(), CV_8UC1);
  auto src = img.data();
  std::copy(src.begin(), src.end(), m.ptr<std::uint8_t>(0));
  return m;
}

}  // namespace

RasterImage read_rgb(const std::filesystem::path& path) {
  const cv::Mat m = load(path, cv::IMREAD_COLOR);
  RasterImage img(m.cols, m.rows);
  for (int y = 0; y < m.rows; ++y) {
    const auto* row = m.ptr<cv::Vec3b>(y);
    for (int x = 0; x < m.cols; ++x) img.at(x, y) = {row[x][2], row[x][1], row[x][0]};
  }
  return img;
}

BinaryMask read_mask(const std::filesystem::path& path) {
  const cv::Mat m = load(path, cv::IMREAD_GRAYSCALE);
  BinaryMask mask(m.cols, m.rows);
  for (int y = 0; y < m.rows; ++y) {
    const auto* row = m.ptr<std::uint8_t>(y);
    for (int x = 0; x < m.cols; ++x) mask.set(x, y, row[x] >= 128);
  }
  return mask;
}

void write_image(const std::filesystem::path& path, const RasterImage& img) {
  cv::Mat m(img.height(), img.width(), CV_8UC3);
  for (int y = 0; y < img.height(); ++y) {
    auto* row = m.ptr<cv::Vec3b>(y);
    for (int x = 0; x < img.width(); ++x) {
      const Rgb p = img.at(x, y);
      row[x] = {p.b, p.g, p.r};
    }
  }
  store(path, m);
}

void write_image(const std::filesystem::path& path, const ChannelImage& img) {
  store(path, to_mat(img));
}

void write_image(const std::filesystem::path& path, const BinaryMask& mask) {
  store(path, to_mat(mask));
}

}  // namespace leukoseg
