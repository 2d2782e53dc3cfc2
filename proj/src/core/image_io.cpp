#include "core/image_io.hpp"

#include <png.h>

#include <cctype>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <vector>

#include "core/errors.hpp"

namespace qsr {

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

std::string lower_ext(const std::string& path) {
    const auto dot = path.find_last_of('.');
    if (dot == std::string::npos) return "";
    std::string ext = path.substr(dot + 1);
    for (auto& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return ext;
}

Image load_png(const std::string& path, std::FILE* fp) {
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw IoError("libpng init failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw IoError("libpng init failed");
    }
    std::vector<png_bytep> row_ptrs;
    std::vector<png_byte> pixels;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw CorruptError("corrupt PNG data: " + path);
    }
    png_init_io(png, fp);
    png_read_info(png, info);

    const png_uint_32 w = png_get_image_width(png, info);
    const png_uint_32 h = png_get_image_height(png, info);
    const int color_type = png_get_color_type(png, info);
    const int bit_depth = png_get_bit_depth(png, info);

    // normalize everything to 8-bit gray or RGB
    if (bit_depth == 16) png_set_strip_16(png);
    if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    if (color_type & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
    png_read_update_info(png, info);

    const int channels = png_get_channels(png, info);
    if (channels != 1 && channels != 3) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw FormatError("unsupported PNG channel layout: " + path);
    }

    const std::size_t stride = png_get_rowbytes(png, info);
    pixels.resize(stride * h);
    row_ptrs.resize(h);
    for (png_uint_32 r = 0; r < h; ++r) {
        row_ptrs[r] = pixels.data() + r * stride;
    }
    png_read_image(png, row_ptrs.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);

    Image img(static_cast<int>(w), static_cast<int>(h), channels);
    for (int c = 0; c < channels; ++c) {
        double* plane = img.plane(c);
        for (png_uint_32 r = 0; r < h; ++r) {
            const png_byte* row = pixels.data() + r * stride;
            for (png_uint_32 x = 0; x < w; ++x) {
                plane[r * w + x] = row[x * channels + c] / 255.0;
            }
        }
    }
    return img;
}

void save_png(const Image& img, const std::string& path) {
    FilePtr fp(std::fopen(path.c_str(), "wb"));
    if (!fp) throw IoError("cannot write file: " + path);
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw IoError("libpng init failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw IoError("libpng init failed");
    }
    std::vector<png_byte> row(static_cast<std::size_t>(img.width) * img.channels);
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw IoError("PNG encode failed: " + path);
    }
    png_init_io(png, fp.get());
    const int color = (img.channels == 1) ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB;
    png_set_IHDR(png, info, img.width, img.height, 8, color, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    for (int r = 0; r < img.height; ++r) {
        for (int x = 0; x < img.width; ++x) {
            for (int c = 0; c < img.channels; ++c) {
                row[static_cast<std::size_t>(x) * img.channels + c] = encode_u8(img.at(r, x, c));
            }
        }
        png_write_row(png, row.data());
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

int pnm_next_int(std::istream& in, const std::string& path) {
    // skips whitespace and '#' comments per the PNM grammar
    int c = in.get();
    while (c != EOF) {
        if (c == '#') {
            while (c != EOF && c != '\n') c = in.get();
        } else if (!std::isspace(c)) {
            break;
        }
        c = in.get();
    }
    if (c == EOF) throw TruncatedError("truncated PNM header: " + path);
    if (!std::isdigit(c)) throw CorruptError("malformed PNM header: " + path);
    int value = 0;
    while (c != EOF && std::isdigit(c)) {
        value = value * 10 + (c - '0');
        c = in.get();
    }
    return value;
}

Image load_pnm(const std::string& path, bool color) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open file: " + path);
    char magic[2];
    in.read(magic, 2);
    if (in.gcount() != 2 || magic[0] != 'P' || magic[1] != (color ? '6' : '5')) {
        throw FormatError("not a binary PNM file: " + path);
    }
    const int w = pnm_next_int(in, path);
    const int h = pnm_next_int(in, path);
    const int maxval = pnm_next_int(in, path);
    if (w < 1 || h < 1) throw CorruptError("bad PNM dimensions: " + path);
    if (maxval != 255) throw FormatError("unsupported PNM maxval (want 255): " + path);
    // the single whitespace byte after maxval was already consumed by the parser

    const int channels = color ? 3 : 1;
    std::vector<unsigned char> buf(static_cast<std::size_t>(w) * h * channels);
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (static_cast<std::size_t>(in.gcount()) != buf.size()) {
        throw TruncatedError("truncated PNM payload: " + path);
    }
    Image img(w, h, channels);
    for (int c = 0; c < channels; ++c) {
        double* plane = img.plane(c);
        for (std::size_t i = 0; i < static_cast<std::size_t>(w) * h; ++i) {
            plane[i] = buf[i * channels + c] / 255.0;
        }
    }
    return img;
}

void save_pnm(const Image& img, const std::string& path, bool color) {
    if (color && img.channels != 3) throw DimensionError("PPM requires 3 channels");
    if (!color && img.channels != 1) throw DimensionError("PGM requires 1 channel");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write file: " + path);
    out << (color ? "P6" : "P5") << "\n" << img.width << " " << img.height << "\n255\n";
    std::vector<unsigned char> buf(static_cast<std::size_t>(img.width) * img.height * img.channels);
    for (int r = 0; r < img.height; ++r) {
        for (int x = 0; x < img.width; ++x) {
            for (int c = 0; c < img.channels; ++c) {
                buf[(static_cast<std::size_t>(r) * img.width + x) * img.channels + c] =
                    encode_u8(img.at(r, x, c));
            }
        }
    }
    out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (!out) throw IoError("write failed: " + path);
}

} // namespace

Image load_image(const std::string& path) {
    FilePtr fp(std::fopen(path.c_str(), "rb"));
    if (!fp) throw IoError("cannot open file: " + path);
    unsigned char sig[8] = {0};
    const std::size_t got = std::fread(sig, 1, 8, fp.get());
    if (got >= 8 && png_sig_cmp(sig, 0, 8) == 0) {
        std::rewind(fp.get());
        return load_png(path, fp.get());
    }
    fp.reset();
    if (got >= 2 && sig[0] == 'P' && sig[1] == '5') return load_pnm(path, false);
    if (got >= 2 && sig[0] == 'P' && sig[1] == '6') return load_pnm(path, true);
    throw FormatError("unsupported image format: " + path);
}

void save_image(const Image& img, const std::string& path) {
    if (img.channels != 1 && img.channels != 3) {
        throw DimensionError("save_image supports 1- or 3-channel images");
    }
    const std::string ext = lower_ext(path);
    if (ext == "png") {
        save_png(img, path);
    } else if (ext == "pgm") {
        save_pnm(img, path, false);
    } else if (ext == "ppm") {
        save_pnm(img, path, true);
    } else {
        throw FormatError("unsupported output extension: " + path);
    }
}

} // namespace qsr
