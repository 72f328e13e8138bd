#include "npseg/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

namespace npseg {
namespace {

std::string lower_extension(const std::filesystem::path& path) {
    std::string ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
    return ext;
}

Image from_bytes(int width, int height, int channels, const std::uint8_t* bytes, int maxval = 255) {
    std::vector<double> data(static_cast<std::size_t>(width) * height * channels);
    for (std::size_t i = 0; i < data.size(); ++i) {
        if (maxval == 255) {
            data[i] = bytes[i] / 255.0;
        } else {
            // Rescale onto the 8-bit grid so the k/255 invariant holds for any maxval <= 255.
            data[i] = to_byte(static_cast<double>(bytes[i]) / maxval) / 255.0;
        }
    }
    return Image(width, height, channels, std::move(data));
}

std::vector<std::uint8_t> to_bytes(const Image& image) {
    std::vector<std::uint8_t> out(image.data().size());
    std::transform(image.data().begin(), image.data().end(), out.begin(), to_byte);
    return out;
}

// --- PNM -----------------------------------------------------------------

class PnmHeaderReader {
public:
    explicit PnmHeaderReader(const std::string& buf) : buf_(buf) {}

    int next_int() {
        skip_space_and_comments();
        if (pos_ >= buf_.size() || !std::isdigit(static_cast<unsigned char>(buf_[pos_]))) {
            throw DataError("malformed PNM header");
        }
        long value = 0;
        while (pos_ < buf_.size() && std::isdigit(static_cast<unsigned char>(buf_[pos_]))) {
            value = value * 10 + (buf_[pos_] - '0');
            if (value > (1L << 30)) throw DataError("PNM header value out of range");
            ++pos_;
        }
        return static_cast<int>(value);
    }

    // Exactly one whitespace byte separates maxval from the raster.
    std::size_t raster_offset() {
        if (pos_ >= buf_.size() || !std::isspace(static_cast<unsigned char>(buf_[pos_]))) {
            throw DataError("malformed PNM header");
        }
        return pos_ + 1;
    }

private:
    void skip_space_and_comments() {
        while (pos_ < buf_.size()) {
            if (std::isspace(static_cast<unsigned char>(buf_[pos_]))) {
                ++pos_;
            } else if (buf_[pos_] == '#') {
                while (pos_ < buf_.size() && buf_[pos_] != '\n') ++pos_;
            } else {
                break;
            }
        }
    }

    const std::string& buf_;
    std::size_t pos_ = 2;
};

Image load_pnm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (buf.size() < 2 || buf[0] != 'P' || (buf[1] != '5' && buf[1] != '6')) {
        throw DataError(path.string() + ": not a binary PGM (P5) or PPM (P6) file");
    }
    const int channels = buf[1] == '5' ? 1 : 3;
    PnmHeaderReader header(buf);
    const int width = header.next_int();
    const int height = header.next_int();
    const int maxval = header.next_int();
    if (width <= 0 || height <= 0) throw DataError(path.string() + ": invalid dimensions");
    if (maxval <= 0) throw DataError(path.string() + ": invalid maxval");
    if (maxval > 255) {
        throw DataError(path.string() + ": unsupported bit depth (maxval " + std::to_string(maxval) +
                        "); only 8-bit images are supported");
    }
    const std::size_t offset = header.raster_offset();
    const std::size_t need = static_cast<std::size_t>(width) * height * channels;
    if (buf.size() < offset + need) throw DataError(path.string() + ": truncated raster");
    return from_bytes(width, height, channels,
                      reinterpret_cast<const std::uint8_t*>(buf.data() + offset), maxval);
}

void save_pnm(const Image& image, const std::filesystem::path& path, bool color) {
    if (color != (image.channels() == 3)) {
        throw InvalidArgument(path.string() + ": PGM needs 1 channel and PPM needs 3");
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path.string());
    out << (color ? "P6" : "P5") << '\n' << image.width() << ' ' << image.height() << "\n255\n";
    const auto bytes = to_bytes(image);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw DataError("failed writing " + path.string());
}

// --- PNG -----------------------------------------------------------------

Image load_png(const std::filesystem::path& path) {
    png_image png;
    std::memset(&png, 0, sizeof png);
    png.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_file(&png, path.string().c_str())) {
        throw DataError(path.string() + ": " + png.message);
    }
    if (png.format & PNG_FORMAT_FLAG_LINEAR) {
        png_image_free(&png);
        throw DataError(path.string() + ": unsupported bit depth (16-bit PNG); only 8-bit images are supported");
    }
    if (png.format & PNG_FORMAT_FLAG_ALPHA) {
        png_image_free(&png);
        throw DataError(path.string() + ": images with an alpha channel are not supported");
    }
    const bool color = (png.format & PNG_FORMAT_FLAG_COLOR) != 0;
    png.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
    std::vector<std::uint8_t> bytes(PNG_IMAGE_SIZE(png));
    if (!png_image_finish_read(&png, nullptr, bytes.data(), 0, nullptr)) {
        const std::string msg = png.message;
        png_image_free(&png);
        throw DataError(path.string() + ": " + msg);
    }
    return from_bytes(static_cast<int>(png.width), static_cast<int>(png.height), color ? 3 : 1,
                      bytes.data());
}

void save_png(const Image& image, const std::filesystem::path& path) {
    png_image png;
    std::memset(&png, 0, sizeof png);
    png.version = PNG_IMAGE_VERSION;
    png.width = static_cast<png_uint_32>(image.width());
    png.height = static_cast<png_uint_32>(image.height());
    png.format = image.channels() == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
    const auto bytes = to_bytes(image);
    if (!png_image_write_to_file(&png, path.string().c_str(), 0, bytes.data(), 0, nullptr)) {
        throw DataError("cannot write " + path.string() + ": " + png.message);
    }
}

}  // namespace

Image load_image(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) throw DataError("no such file: " + path.string());
    std::ifstream probe(path, std::ios::binary);
    char magic[8] = {};
    probe.read(magic, sizeof magic);
    if (probe.gcount() >= 8 && png_sig_cmp(reinterpret_cast<png_const_bytep>(magic), 0, 8) == 0) {
        return load_png(path);
    }
    if (probe.gcount() >= 2 && magic[0] == 'P') return load_pnm(path);
    throw DataError(path.string() + ": unsupported image format (expected PNG, PGM or PPM)");
}

void save_image(const Image& image, const std::filesystem::path& path) {
    const std::string ext = lower_extension(path);
    if (ext == ".png") {
        save_png(image, path);
    } else if (ext == ".pgm") {
        save_pnm(image, path, false);
    } else if (ext == ".ppm") {
        save_pnm(image, path, true);
    } else {
        throw InvalidArgument(path.string() + ": unknown output extension (use .png, .pgm or .ppm)");
    }
}

}  // namespace npseg
