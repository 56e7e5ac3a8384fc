/**
 * @file ImageIO.cpp
 * @brief PNG via the libpng simplified API, PGM by hand
 */

#include <czi/imaging/ImageIO.h>
#include <czi/core/Error.h>

#include <png.h>

#include <array>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

namespace czi::imaging {

namespace {

const std::array<unsigned char, 8> kPngSignature = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};

GrayImage ReadPng(const std::filesystem::path& path) {
    png_image image;
    std::memset(&image, 0, sizeof(image));
    image.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_file(&image, path.c_str())) {
        throw DataError("LoadImage: cannot decode PNG '" + path.string() + "': " + image.message);
    }
    image.format = PNG_FORMAT_RGBA;
    std::vector<png_byte> buffer(PNG_IMAGE_SIZE(image));
    if (!png_image_finish_read(&image, nullptr, buffer.data(), 0, nullptr)) {
        std::string msg = image.message;
        png_image_free(&image);
        throw DataError("LoadImage: cannot decode PNG '" + path.string() + "': " + msg);
    }
    const int w = static_cast<int>(image.width);
    const int h = static_cast<int>(image.height);
    std::vector<double> data(static_cast<size_t>(w) * h);
    for (size_t i = 0; i < data.size(); ++i) {
        const png_byte* px = &buffer[4 * i];
        data[i] = (static_cast<double>(px[0]) + px[1] + px[2]) / (3.0 * 255.0);
    }
    return GrayImage(w, h, std::move(data));
}

// Next whitespace-delimited header token, skipping '#' comments.
std::string NextPgmToken(std::istream& in) {
    std::string token;
    int c;
    while ((c = in.get()) != EOF) {
        if (c == '#') {
            while ((c = in.get()) != EOF && c != '\n') {
            }
            continue;
        }
        if (std::isspace(c)) {
            if (!token.empty()) {
                break;
            }
            continue;
        }
        token.push_back(static_cast<char>(c));
    }
    return token;
}

int ParsePositive(const std::string& token, const std::filesystem::path& path) {
    try {
        size_t used = 0;
        int v = std::stoi(token, &used);
        if (used == token.size() && v > 0) {
            return v;
        }
    } catch (const std::exception&) {
    }
    throw DataError("LoadImage: malformed PGM header in '" + path.string() + "'");
}

GrayImage ReadPgm(std::ifstream& in, const std::filesystem::path& path) {
    std::string magic = NextPgmToken(in);
    if (magic != "P5") {
        throw DataError("LoadImage: only binary PGM (P5) is supported: '" + path.string() + "'");
    }
    const int w = ParsePositive(NextPgmToken(in), path);
    const int h = ParsePositive(NextPgmToken(in), path);
    const int maxval = ParsePositive(NextPgmToken(in), path);
    if (maxval > 255) {
        throw DataError("LoadImage: 16-bit PGM is not supported: '" + path.string() + "'");
    }
    std::vector<unsigned char> raw(static_cast<size_t>(w) * h);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (in.gcount() != static_cast<std::streamsize>(raw.size())) {
        throw DataError("LoadImage: truncated PGM data in '" + path.string() + "'");
    }
    std::vector<double> data(raw.size());
    for (size_t i = 0; i < raw.size(); ++i) {
        data[i] = std::min(1.0, raw[i] / static_cast<double>(maxval));
    }
    return GrayImage(w, h, std::move(data));
}

std::vector<unsigned char> Quantize(const GrayImage& img) {
    std::vector<unsigned char> out(img.Data().size());
    for (size_t i = 0; i < out.size(); ++i) {
        out[i] = static_cast<unsigned char>(std::lround(std::clamp(img.Data()[i], 0.0, 1.0) * 255.0));
    }
    return out;
}

} // namespace

GrayImage LoadImage(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError("LoadImage: cannot open '" + path.string() + "'");
    }
    std::array<unsigned char, 8> head{};
    in.read(reinterpret_cast<char*>(head.data()), head.size());
    const auto got = in.gcount();
    if (got == 8 && head == kPngSignature) {
        in.close();
        return ReadPng(path);
    }
    if (got >= 2 && head[0] == 'P' && head[1] == '5') {
        in.clear();
        in.seekg(0);
        return ReadPgm(in, path);
    }
    throw DataError("LoadImage: unsupported format (expected PNG or binary PGM): '" +
                    path.string() + "'");
}

void WritePgm(const GrayImage& img, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw DataError("WritePgm: cannot open '" + path.string() + "' for writing");
    }
    out << "P5\n" << img.Width() << ' ' << img.Height() << "\n255\n";
    const auto bytes = Quantize(img);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw DataError("WritePgm: write failed for '" + path.string() + "'");
    }
}

void WritePng(const GrayImage& img, const std::filesystem::path& path) {
    png_image image;
    std::memset(&image, 0, sizeof(image));
    image.version = PNG_IMAGE_VERSION;
    image.width = static_cast<png_uint_32>(img.Width());
    image.height = static_cast<png_uint_32>(img.Height());
    image.format = PNG_FORMAT_GRAY;
    const auto bytes = Quantize(img);
    if (!png_image_write_to_file(&image, path.c_str(), 0, bytes.data(), 0, nullptr)) {
        throw DataError("WritePng: cannot write '" + path.string() + "': " + image.message);
    }
}

} // namespace czi::imaging
