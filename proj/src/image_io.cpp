#include <png.h>

#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <vector>

#include "noise2vst/image.hpp"

namespace n2v {

namespace {

constexpr char kNpfMagic[4] = {'N', '2', 'V', 'F'};

void put_u32_le(std::vector<unsigned char>& out, std::uint32_t v) {
    out.push_back(static_cast<unsigned char>(v & 0xff));
    out.push_back(static_cast<unsigned char>((v >> 8) & 0xff));
    out.push_back(static_cast<unsigned char>((v >> 16) & 0xff));
    out.push_back(static_cast<unsigned char>((v >> 24) & 0xff));
}

std::uint32_t get_u32_le(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::string lower_extension(const std::string& path) {
    const auto dot = path.find_last_of('.');
    if (dot == std::string::npos) return "";
    std::string ext = path.substr(dot + 1);
    for (char& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return ext;
}

std::vector<unsigned char> read_all(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open file for reading: " + path);
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                     std::istreambuf_iterator<char>());
    if (in.bad())
        throw IoError("read failure: " + path);
    return bytes;
}

void write_all(const std::string& path, const unsigned char* data, std::size_t size) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError("cannot open file for writing: " + path);
    out.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(size));
    if (!out)
        throw IoError("write failure: " + path);
}

// --- PNG ------------------------------------------------------------------

struct PngReadCtx {
    const unsigned char* data;
    std::size_t size;
    std::size_t pos;
};

void png_mem_read(png_structp png, png_bytep out, png_size_t len) {
    auto* ctx = static_cast<PngReadCtx*>(png_get_io_ptr(png));
    if (ctx->pos + len > ctx->size)
        png_error(png, "unexpected end of data");
    std::memcpy(out, ctx->data + ctx->pos, len);
    ctx->pos += len;
}

ImageBuffer load_png(const std::vector<unsigned char>& bytes, double expected_range) {
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError("libpng initialization failed");
    }
    std::vector<png_byte> pixels;
    std::vector<png_bytep> rows;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw FormatError("corrupt PNG data");
    }
    PngReadCtx ctx{bytes.data(), bytes.size(), 0};
    png_set_read_fn(png, &ctx, png_mem_read);
    png_read_info(png, info);

    const png_byte color_type = png_get_color_type(png, info);
    png_byte bit_depth = png_get_bit_depth(png, info);

    if (color_type == PNG_COLOR_TYPE_PALETTE)
        png_set_palette_to_rgb(png);
    if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8)
        png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS))
        png_set_tRNS_to_alpha(png);
    if (color_type == PNG_COLOR_TYPE_GRAY_ALPHA)
        png_set_strip_alpha(png);
    if (bit_depth == 16)
        png_set_swap(png);  // file is big-endian, host is little-endian
    png_read_update_info(png, info);

    const png_uint_32 width = png_get_image_width(png, info);
    const png_uint_32 height = png_get_image_height(png, info);
    bit_depth = png_get_bit_depth(png, info);
    const int channels = png_get_channels(png, info);
    if (bit_depth != 8 && bit_depth != 16) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw FormatError("unsupported PNG bit depth");
    }
    if (channels != 1 && channels != 3 && channels != 4) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw FormatError("unsupported PNG channel count");
    }

    const std::size_t rowbytes = png_get_rowbytes(png, info);
    pixels.resize(rowbytes * height);
    rows.resize(height);
    for (png_uint_32 r = 0; r < height; ++r)
        rows[r] = pixels.data() + r * rowbytes;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);

    const double peak = expected_range > 0.0 ? expected_range
                                             : (bit_depth == 16 ? 65535.0 : 255.0);
    ImageBuffer img(static_cast<int>(height), static_cast<int>(width), channels);
    const std::size_t n = img.size();
    if (bit_depth == 8) {
        for (std::size_t i = 0; i < n; ++i)
            img.data[i] = pixels[i] / peak;
    } else {
        const auto* p16 = reinterpret_cast<const std::uint16_t*>(pixels.data());
        for (std::size_t i = 0; i < n; ++i)
            img.data[i] = p16[i] / peak;
    }
    return img;
}

void save_png(const ImageBuffer& img, const std::string& path, int bit_depth) {
    FILE* fp = std::fopen(path.c_str(), "wb");
    if (!fp)
        throw IoError("cannot open file for writing: " + path);
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        if (fp) std::fclose(fp);
        png_destroy_write_struct(&png, &info);
        throw IoError("libpng initialization failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        std::fclose(fp);
        throw IoError("PNG write failure: " + path);
    }
    png_init_io(png, fp);

    int color_type = PNG_COLOR_TYPE_GRAY;
    if (img.channels == 3) color_type = PNG_COLOR_TYPE_RGB;
    if (img.channels == 4) color_type = PNG_COLOR_TYPE_RGBA;
    png_set_IHDR(png, info, img.width, img.height, bit_depth, color_type,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    if (bit_depth == 16)
        png_set_swap(png);

    const double peak = bit_depth == 16 ? 65535.0 : 255.0;
    const std::size_t samples_per_row = static_cast<std::size_t>(img.width) * img.channels;
    if (bit_depth == 8) {
        std::vector<png_byte> row(samples_per_row);
        for (int r = 0; r < img.height; ++r) {
            for (std::size_t i = 0; i < samples_per_row; ++i) {
                double v = img.data[r * samples_per_row + i];
                v = std::min(1.0, std::max(0.0, v));
                row[i] = static_cast<png_byte>(std::nearbyint(v * peak));
            }
            png_write_row(png, row.data());
        }
    } else {
        std::vector<std::uint16_t> row(samples_per_row);
        for (int r = 0; r < img.height; ++r) {
            for (std::size_t i = 0; i < samples_per_row; ++i) {
                double v = img.data[r * samples_per_row + i];
                v = std::min(1.0, std::max(0.0, v));
                row[i] = static_cast<std::uint16_t>(std::nearbyint(v * peak));
            }
            png_write_row(png, reinterpret_cast<png_bytep>(row.data()));
        }
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    std::fclose(fp);
}

// --- PGM / PPM (binary) -----------------------------------------------------

// Reads one whitespace-delimited ASCII token, skipping '#' comments.
std::size_t pnm_token(const std::vector<unsigned char>& b, std::size_t pos, long& value) {
    while (pos < b.size()) {
        if (std::isspace(b[pos])) {
            ++pos;
        } else if (b[pos] == '#') {
            while (pos < b.size() && b[pos] != '\n') ++pos;
        } else {
            break;
        }
    }
    if (pos >= b.size() || !std::isdigit(b[pos]))
        throw FormatError("corrupt PNM header");
    value = 0;
    while (pos < b.size() && std::isdigit(b[pos])) {
        value = value * 10 + (b[pos] - '0');
        ++pos;
    }
    return pos;
}

ImageBuffer load_pnm(const std::vector<unsigned char>& bytes, double expected_range) {
    const int channels = bytes[1] == '5' ? 1 : 3;
    long width = 0, height = 0, maxval = 0;
    std::size_t pos = 2;
    pos = pnm_token(bytes, pos, width);
    pos = pnm_token(bytes, pos, height);
    pos = pnm_token(bytes, pos, maxval);
    if (pos >= bytes.size() || !std::isspace(bytes[pos]))
        throw FormatError("corrupt PNM header");
    ++pos;  // single whitespace before the raster
    if (width <= 0 || height <= 0)
        throw FormatError("corrupt PNM header");
    if (maxval <= 0 || maxval > 65535)
        throw FormatError("unsupported PNM bit depth");

    ImageBuffer img(static_cast<int>(height), static_cast<int>(width), channels);
    const std::size_t n = img.size();
    const double peak = expected_range > 0.0 ? expected_range : static_cast<double>(maxval);
    if (maxval < 256) {
        if (bytes.size() - pos < n)
            throw FormatError("truncated PNM raster");
        for (std::size_t i = 0; i < n; ++i)
            img.data[i] = bytes[pos + i] / peak;
    } else {
        if (bytes.size() - pos < 2 * n)
            throw FormatError("truncated PNM raster");
        for (std::size_t i = 0; i < n; ++i) {
            // big-endian sample order per the Netpbm spec
            const unsigned hi = bytes[pos + 2 * i], lo = bytes[pos + 2 * i + 1];
            img.data[i] = static_cast<double>((hi << 8) | lo) / peak;
        }
    }
    return img;
}

void save_pnm(const ImageBuffer& img, const std::string& path, int bit_depth) {
    if (img.channels != 1 && img.channels != 3)
        throw std::invalid_argument("PNM supports 1 or 3 channels");
    const long maxval = bit_depth == 16 ? 65535 : 255;
    char header[64];
    const int header_len = std::snprintf(header, sizeof(header), "P%c\n%d %d\n%ld\n",
                                         img.channels == 1 ? '5' : '6',
                                         img.width, img.height, maxval);
    std::vector<unsigned char> out(header, header + header_len);
    for (double raw : img.data) {
        const double v = std::min(1.0, std::max(0.0, raw));
        const long q = static_cast<long>(std::nearbyint(v * static_cast<double>(maxval)));
        if (maxval > 255)
            out.push_back(static_cast<unsigned char>((q >> 8) & 0xff));
        out.push_back(static_cast<unsigned char>(q & 0xff));
    }
    write_all(path, out.data(), out.size());
}

// --- NPF1 float container ---------------------------------------------------

ImageBuffer load_npf(const std::vector<unsigned char>& bytes) {
    if (bytes.size() < 16)
        throw FormatError("truncated NPF1 header");
    const std::uint32_t h = get_u32_le(bytes.data() + 4);
    const std::uint32_t w = get_u32_le(bytes.data() + 8);
    const std::uint32_t c = get_u32_le(bytes.data() + 12);
    if (h == 0 || w == 0 || (c != 1 && c != 3 && c != 4))
        throw FormatError("bad NPF1 dimensions");
    const std::size_t n = static_cast<std::size_t>(h) * w * c;
    if (bytes.size() - 16 < 4 * n)
        throw FormatError("truncated NPF1 data");
    ImageBuffer img(static_cast<int>(h), static_cast<int>(w), static_cast<int>(c));
    for (std::size_t i = 0; i < n; ++i) {
        const std::uint32_t u = get_u32_le(bytes.data() + 16 + 4 * i);
        float f;
        std::memcpy(&f, &u, 4);
        img.data[i] = static_cast<double>(f);
    }
    return img;
}

}  // namespace

void save_npf(const ImageBuffer& img, const std::string& path) {
    std::vector<unsigned char> out(kNpfMagic, kNpfMagic + 4);
    put_u32_le(out, static_cast<std::uint32_t>(img.height));
    put_u32_le(out, static_cast<std::uint32_t>(img.width));
    put_u32_le(out, static_cast<std::uint32_t>(img.channels));
    out.reserve(out.size() + 4 * img.size());
    for (double v : img.data) {
        const float f = static_cast<float>(v);
        std::uint32_t u;
        std::memcpy(&u, &f, 4);
        put_u32_le(out, u);
    }
    write_all(path, out.data(), out.size());
}

ImageBuffer load_image(const std::string& path, double expected_range) {
    const std::vector<unsigned char> bytes = read_all(path);
    if (bytes.size() >= 8 && png_sig_cmp(bytes.data(), 0, 8) == 0)
        return load_png(bytes, expected_range);
    if (bytes.size() >= 2 && bytes[0] == 'P' && (bytes[1] == '5' || bytes[1] == '6'))
        return load_pnm(bytes, expected_range);
    if (bytes.size() >= 4 && std::memcmp(bytes.data(), kNpfMagic, 4) == 0)
        return load_npf(bytes);
    throw FormatError("unrecognized image format (corrupt header?): " + path);
}

void save_image(const ImageBuffer& img, const std::string& path, int bit_depth) {
    if (bit_depth != 8 && bit_depth != 16)
        throw std::invalid_argument("save_image: bit depth must be 8 or 16");
    const std::string ext = lower_extension(path);
    if (ext == "png") {
        save_png(img, path, bit_depth);
    } else if (ext == "pgm" || ext == "ppm" || ext == "pnm") {
        save_pnm(img, path, bit_depth);
    } else if (ext == "npf") {
        save_npf(img, path);
    } else {
        throw std::invalid_argument("save_image: unsupported extension ." + ext);
    }
}

}  // namespace n2v
