#include <gtest/gtest.h>

#include <png.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "ebl/image_io.hpp"
#include "oracles.hpp"

using namespace ebl;
namespace fs = std::filesystem;

namespace {

class ImageIo : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("ebl_io_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    void write_raw(const std::string& name, const std::string& bytes) const {
        std::ofstream(path(name), std::ios::binary) << bytes;
    }

    fs::path dir_;
};

void write_gray_png(const std::string& path, int w, int h, int depth, const std::vector<int>& samples) {
    FILE* fp = std::fopen(path.c_str(), "wb");
    ASSERT_NE(fp, nullptr);
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png_create_info_struct(png);
    png_init_io(png, fp);
    png_set_IHDR(png, info, w, h, depth, PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    const int bytes = depth / 8;
    std::vector<png_byte> row(std::size_t(w) * bytes);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const int s = samples[std::size_t(y) * w + x];
            if (bytes == 1) {
                row[x] = png_byte(s);
            } else {
                row[2 * x] = png_byte(s >> 8);
                row[2 * x + 1] = png_byte(s & 0xff);
            }
        }
        png_write_row(png, row.data());
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    std::fclose(fp);
}

}  // namespace

TEST_F(ImageIo, FieldRoundTrip8And16Bit) {
    const ScalarField2D f = oracle::random_field(17, 11, 1, 0.0, 1.0);
    for (int maxval : {255, 65535}) {
        const std::string p = path("f" + std::to_string(maxval) + ".pgm");
        write_pgm(p, f, maxval);
        const ScalarField2D back = read_pgm_field(p);
        ASSERT_TRUE(back.same_shape(f));
        EXPECT_LE(max_abs_diff(back, f), 0.5 / maxval + 1e-15) << maxval;
    }
}

TEST_F(ImageIo, MaskRoundTripIsExact) {
    const BinaryMask m = oracle::random_mask(9, 14, 2);
    write_pgm(path("m.pgm"), m);
    EXPECT_EQ(read_pgm_mask(path("m.pgm")), m);
    write_pgm(path("m16.pgm"), m, 65535);
    EXPECT_EQ(read_image_mask(path("m16.pgm")), m);
}

TEST_F(ImageIo, OutOfRangeValuesAreClamped) {
    ScalarField2D f(2, 1);
    f[0] = -0.3;
    f[1] = 1.7;
    write_pgm(path("c.pgm"), f);
    const ScalarField2D back = read_pgm_field(path("c.pgm"));
    EXPECT_EQ(back[0], 0.0);
    EXPECT_EQ(back[1], 1.0);
}

TEST_F(ImageIo, HeaderCommentsAreSkipped) {
    write_raw("c.pgm", std::string("P5\n# made by hand\n2 1\n255\n") + char(0) + char(255));
    const ScalarField2D f = read_pgm_field(path("c.pgm"));
    EXPECT_EQ(f[0], 0.0);
    EXPECT_EQ(f[1], 1.0);
}

TEST_F(ImageIo, AsciiPgmIsRejected) {
    write_raw("a.pgm", "P2\n2 1\n255\n0 255\n");
    try {
        read_pgm_field(path("a.pgm"));
        FAIL() << "expected an exception";
    } catch (const std::runtime_error& e) {
        EXPECT_NE(std::string(e.what()).find("P2"), std::string::npos);
    }
}

TEST_F(ImageIo, MalformedFilesAreRejected) {
    write_raw("t.pgm", "P5\n4 4\n255\n\x01\x02");
    EXPECT_THROW(read_pgm_field(path("t.pgm")), std::runtime_error);
    write_raw("h.pgm", "P5\n4 x\n255\n");
    EXPECT_THROW(read_pgm_field(path("h.pgm")), std::runtime_error);
    write_raw("v.pgm", "P5\n1 1\n1000\n\x01\x02");
    EXPECT_THROW(read_pgm_field(path("v.pgm")), std::runtime_error);
    write_raw("x.bin", "hello");
    EXPECT_THROW(read_image_field(path("x.bin")), std::runtime_error);
    EXPECT_THROW(read_pgm_field(path("missing.pgm")), std::runtime_error);
}

TEST_F(ImageIo, NonBinaryMaskIsRejected) {
    write_raw("m.pgm", std::string("P5\n2 1\n255\n") + char(0) + char(128));
    EXPECT_THROW(read_pgm_mask(path("m.pgm")), std::runtime_error);
}

TEST_F(ImageIo, InvalidMaxvalForWriting) {
    EXPECT_THROW(write_pgm(path("w.pgm"), ScalarField2D(2, 2), 1000), std::invalid_argument);
}

TEST_F(ImageIo, PngGrayscale) {
    write_gray_png(path("g8.png"), 3, 2, 8, {0, 51, 255, 102, 204, 153});
    const ScalarField2D f8 = read_image_field(path("g8.png"));
    ASSERT_EQ(f8.width(), 3);
    ASSERT_EQ(f8.height(), 2);
    EXPECT_DOUBLE_EQ(f8(1, 0), 0.2);
    EXPECT_DOUBLE_EQ(f8(2, 0), 1.0);
    EXPECT_DOUBLE_EQ(f8(0, 1), 0.4);

    write_gray_png(path("g16.png"), 2, 1, 16, {0, 65535});
    const ScalarField2D f16 = read_png_field(path("g16.png"));
    EXPECT_EQ(f16[0], 0.0);
    EXPECT_EQ(f16[1], 1.0);

    write_gray_png(path("m.png"), 2, 2, 8, {0, 255, 255, 0});
    const BinaryMask m = read_image_mask(path("m.png"));
    EXPECT_EQ(m.count(), 2u);
    EXPECT_EQ(m(1, 0), 1);
}
