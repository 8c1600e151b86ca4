#include "ads/io.hpp"

#include <png.h>

#include <csetjmp>
#include <cstdio>
#include <filesystem>
#include <memory>
#include <vector>

namespace ads {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FileHandle = std::unique_ptr<std::FILE, FileCloser>;

void ensure_parent(const std::string& path) {
  const std::filesystem::path parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(parent, ec);
  }
}

}  // namespace

Image load_png(const std::string& path) {
  FileHandle file(std::fopen(path.c_str(), "rb"));
  if (!file) throw IoError("cannot open: " + path);

  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw IoError("libpng initialization failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw IoError("libpng initialization failed");
  }
  std::vector<png_bytep> row_pointers;
  std::vector<png_byte> pixels;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError("failed decoding PNG: " + path);
  }
  png_init_io(png, file.get());
  png_read_info(png, info);

  // Normalize every input layout to 8-bit RGB.
  png_set_expand(png);
  png_set_strip_16(png);
  png_set_strip_alpha(png);
  if (png_get_color_type(png, info) == PNG_COLOR_TYPE_GRAY ||
      png_get_color_type(png, info) == PNG_COLOR_TYPE_GRAY_ALPHA)
    png_set_gray_to_rgb(png);
  png_read_update_info(png, info);

  const png_uint_32 width = png_get_image_width(png, info);
  const png_uint_32 height = png_get_image_height(png, info);
  const std::size_t stride = png_get_rowbytes(png, info);
  if (width == 0 || height == 0 || stride < width * 3) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError("unsupported PNG layout: " + path);
  }
  pixels.resize(stride * height);
  row_pointers.resize(height);
  for (png_uint_32 r = 0; r < height; ++r) row_pointers[r] = pixels.data() + r * stride;
  png_read_image(png, row_pointers.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  Image img(static_cast<Index>(width), static_cast<Index>(height));
  for (Index row = 0; row < img.height; ++row)
    for (Index col = 0; col < img.width; ++col)
      for (int ch = 0; ch < 3; ++ch)
        img.rgb(ch, row * img.width + col) =
            pixels[static_cast<std::size_t>(row) * stride + static_cast<std::size_t>(col) * 3 +
                   static_cast<std::size_t>(ch)] /
            255.0;
  return img;
}

void save_png(const std::string& path, const Image& image) {
  ensure_parent(path);
  FileHandle file(std::fopen(path.c_str(), "wb"));
  if (!file) throw IoError("cannot open for writing: " + path);

  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw IoError("libpng initialization failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw IoError("libpng initialization failed");
  }
  std::vector<png_byte> pixels(static_cast<std::size_t>(image.pixel_count()) * 3);
  std::vector<png_bytep> row_pointers(static_cast<std::size_t>(image.height));
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError("failed encoding PNG: " + path);
  }
  png_init_io(png, file.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(image.width),
               static_cast<png_uint_32>(image.height), 8, PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);

  for (Index p = 0; p < image.pixel_count(); ++p)
    for (int ch = 0; ch < 3; ++ch)
      pixels[static_cast<std::size_t>(p) * 3 + static_cast<std::size_t>(ch)] =
          quantize8(image.rgb(ch, p));
  for (Index r = 0; r < image.height; ++r)
    row_pointers[static_cast<std::size_t>(r)] =
        pixels.data() + static_cast<std::size_t>(r) * static_cast<std::size_t>(image.width) * 3;

  png_write_info(png, info);
  png_write_image(png, row_pointers.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  if (std::fflush(file.get()) != 0) throw IoError("failed writing: " + path);
}

}  // namespace ads
