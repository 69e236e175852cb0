#include "ebl/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <stdexcept>
#include <vector>

namespace ebl {

namespace {

struct RawImage {
    int width = 0;
    int height = 0;
    int maxval = 0;
    std::vector<int> samples;
};

[[noreturn]] void malformed(const std::string& path, const std::string& why) {
    throw std::runtime_error("malformed PGM '" + path + "': " + why);
}

// Next header token, skipping whitespace and '#' comments.
std::string header_token(std::istream& in, const std::string& path) {
    std::string token;
    int c = in.get();
    while (c != EOF) {
        if (c == '#') {
            while (c != EOF && c != '\n') c = in.get();
        } else if (std::isspace(c)) {
            c = in.get();
        } else {
            break;
        }
    }
    while (c != EOF && !std::isspace(c) && c != '#') {
        token.push_back(static_cast<char>(c));
        c = in.get();
    }
    if (token.empty()) malformed(path, "truncated header");
    // Exactly one whitespace byte separates maxval from the raster; it was consumed above.
    return token;
}

int parse_positive(const std::string& token, const std::string& path, const char* what) {
    std::size_t used = 0;
    long v = 0;
    try {
        v = std::stol(token, &used);
    } catch (const std::exception&) {
        malformed(path, std::string("bad ") + what);
    }
    if (used != token.size() || v <= 0 || v > 1 << 20) malformed(path, std::string("bad ") + what);
    return static_cast<int>(v);
}

RawImage read_pgm_raw(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    char magic[2] = {0, 0};
    in.read(magic, 2);
    if (!in) malformed(path, "missing magic");
    if (magic[0] == 'P' && magic[1] == '2') {
        malformed(path, "ASCII PGM (P2) is not supported; convert to binary P5");
    }
    if (magic[0] != 'P' || magic[1] != '5') malformed(path, "expected P5 magic");

    RawImage img;
    img.width = parse_positive(header_token(in, path), path, "width");
    img.height = parse_positive(header_token(in, path), path, "height");
    img.maxval = parse_positive(header_token(in, path), path, "maxval");
    if (img.maxval != 255 && img.maxval != 65535) malformed(path, "maxval must be 255 or 65535");

    const std::size_t n = std::size_t(img.width) * std::size_t(img.height);
    const std::size_t bytes_per = img.maxval == 255 ? 1 : 2;
    std::vector<unsigned char> raw(n * bytes_per);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (static_cast<std::size_t>(in.gcount()) != raw.size()) malformed(path, "truncated raster");

    img.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        img.samples[i] = bytes_per == 1 ? raw[i] : (int(raw[2 * i]) << 8) | raw[2 * i + 1];
    }
    return img;
}

RawImage read_png_raw(const std::string& path) {
    std::unique_ptr<FILE, int (*)(FILE*)> fp(std::fopen(path.c_str(), "rb"), &std::fclose);
    if (!fp) throw std::runtime_error("cannot open '" + path + "'");

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (png == nullptr) throw std::runtime_error("libpng initialisation failed");
    png_infop info = png_create_info_struct(png);
    if (info == nullptr) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw std::runtime_error("libpng initialisation failed");
    }
    RawImage img;
    std::vector<png_byte> buffer;
    std::vector<png_bytep> rows;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw std::runtime_error("malformed PNG '" + path + "'");
    }
    png_init_io(png, fp.get());
    png_read_info(png, info);
    const png_byte color = png_get_color_type(png, info);
    const png_byte depth = png_get_bit_depth(png, info);
    if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
    if (color == PNG_COLOR_TYPE_RGB || color == PNG_COLOR_TYPE_RGB_ALPHA ||
        color == PNG_COLOR_TYPE_PALETTE) {
        png_set_rgb_to_gray_fixed(png, 1, -1, -1);
    }
    png_read_update_info(png, info);

    img.width = static_cast<int>(png_get_image_width(png, info));
    img.height = static_cast<int>(png_get_image_height(png, info));
    const int out_depth = png_get_bit_depth(png, info);
    img.maxval = out_depth == 16 ? 65535 : 255;
    const std::size_t rowbytes = png_get_rowbytes(png, info);
    buffer.resize(rowbytes * std::size_t(img.height));
    rows.resize(std::size_t(img.height));
    for (int y = 0; y < img.height; ++y) rows[y] = buffer.data() + rowbytes * std::size_t(y);
    png_read_image(png, rows.data());
    png_destroy_read_struct(&png, &info, nullptr);

    img.samples.resize(std::size_t(img.width) * std::size_t(img.height));
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            const png_byte* row = rows[y];
            img.samples[std::size_t(y) * img.width + x] =
                out_depth == 16 ? (int(row[2 * x]) << 8) | row[2 * x + 1] : row[x];
        }
    }
    return img;
}

bool is_png(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    unsigned char sig[8] = {};
    in.read(reinterpret_cast<char*>(sig), 8);
    return in.gcount() == 8 && png_sig_cmp(sig, 0, 8) == 0;
}

ScalarField2D to_field(const RawImage& img) {
    ScalarField2D f(img.width, img.height);
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = double(img.samples[i]) / double(img.maxval);
    return f;
}

BinaryMask to_mask(const RawImage& img, const std::string& path) {
    BinaryMask m(img.width, img.height);
    for (std::size_t i = 0; i < m.size(); ++i) {
        const int s = img.samples[i];
        if (s != 0 && s != img.maxval) {
            throw std::runtime_error("mask '" + path + "' has non-binary sample " + std::to_string(s) +
                                     " (expected 0 or " + std::to_string(img.maxval) + ")");
        }
        m[i] = s == 0 ? 0 : 1;
    }
    return m;
}

void write_raw(const std::string& path, int width, int height, int maxval,
               const std::vector<int>& samples) {
    if (maxval != 255 && maxval != 65535) throw std::invalid_argument("maxval must be 255 or 65535");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << "P5\n" << width << ' ' << height << '\n' << maxval << '\n';
    std::vector<unsigned char> raw;
    raw.reserve(samples.size() * (maxval == 255 ? 1 : 2));
    for (int s : samples) {
        if (maxval == 255) {
            raw.push_back(static_cast<unsigned char>(s));
        } else {
            raw.push_back(static_cast<unsigned char>(s >> 8));
            raw.push_back(static_cast<unsigned char>(s & 0xFF));
        }
    }
    out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

}  // namespace

ScalarField2D read_pgm_field(const std::string& path) { return to_field(read_pgm_raw(path)); }

BinaryMask read_pgm_mask(const std::string& path) { return to_mask(read_pgm_raw(path), path); }

ScalarField2D read_png_field(const std::string& path) { return to_field(read_png_raw(path)); }

ScalarField2D read_image_field(const std::string& path) {
    return is_png(path) ? read_png_field(path) : read_pgm_field(path);
}

BinaryMask read_image_mask(const std::string& path) {
    return is_png(path) ? to_mask(read_png_raw(path), path) : read_pgm_mask(path);
}

void write_pgm(const std::string& path, const ScalarField2D& field, int maxval) {
    std::vector<int> samples(field.size());
    for (std::size_t i = 0; i < field.size(); ++i) {
        samples[i] = static_cast<int>(std::lround(std::clamp(field[i], 0.0, 1.0) * maxval));
    }
    write_raw(path, field.width(), field.height(), maxval, samples);
}

void write_pgm(const std::string& path, const BinaryMask& mask, int maxval) {
    std::vector<int> samples(mask.size());
    for (std::size_t i = 0; i < mask.size(); ++i) samples[i] = mask[i] ? maxval : 0;
    write_raw(path, mask.width(), mask.height(), maxval, samples);
}

}  // namespace ebl
