#include "smica/io.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "smica/data.hpp"
#include "smica/errors.hpp"

namespace smica {

namespace {

std::string offset_msg(const std::string& what, std::size_t offset) {
    return what + " (byte offset " + std::to_string(offset) + ")";
}

std::vector<char> read_all(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open " + path);
    std::vector<char> bytes((std::istreambuf_iterator<char>(in)),
                            std::istreambuf_iterator<char>());
    return bytes;
}

std::uint32_t le32(const char* p) {
    return static_cast<std::uint8_t>(p[0]) | (static_cast<std::uint8_t>(p[1]) << 8) |
           (static_cast<std::uint8_t>(p[2]) << 16) |
           (static_cast<std::uint32_t>(static_cast<std::uint8_t>(p[3])) << 24);
}

std::uint16_t le16(const char* p) {
    return static_cast<std::uint8_t>(p[0]) | (static_cast<std::uint8_t>(p[1]) << 8);
}

}  // namespace

WavData load_wav(const std::string& path) {
    std::vector<char> b = read_all(path);
    if (b.size() < 12 || std::memcmp(b.data(), "RIFF", 4) != 0)
        throw FormatError(offset_msg(path + ": not a RIFF file", 0));
    if (std::memcmp(b.data() + 8, "WAVE", 4) != 0)
        throw FormatError(offset_msg(path + ": not a WAVE file", 8));

    WavData out;
    bool have_fmt = false;
    std::size_t pos = 12;
    int channels = 0, bits = 0;
    while (pos + 8 <= b.size()) {
        const std::string id(b.data() + pos, 4);
        const std::uint32_t size = le32(b.data() + pos + 4);
        const std::size_t body = pos + 8;
        if (body + size > b.size())
            throw FormatError(offset_msg(path + ": truncated chunk '" + id + "'", pos));
        if (id == "fmt ") {
            if (size < 16)
                throw FormatError(offset_msg(path + ": fmt chunk too short", body));
            const int format = le16(b.data() + body);
            channels = le16(b.data() + body + 2);
            out.sample_rate = static_cast<int>(le32(b.data() + body + 4));
            bits = le16(b.data() + body + 14);
            if (format != 1)
                throw FormatError(offset_msg(path + ": unsupported encoding (not PCM)", body));
            if (channels != 1)
                throw FormatError(offset_msg(path + ": unsupported encoding (not mono)", body + 2));
            if (bits != 16)
                throw FormatError(offset_msg(path + ": unsupported encoding (not 16-bit)", body + 14));
            have_fmt = true;
        } else if (id == "data") {
            if (!have_fmt)
                throw FormatError(offset_msg(path + ": data chunk before fmt", pos));
            if (size % 2 != 0)
                throw FormatError(offset_msg(path + ": odd PCM payload size", pos + 4));
            const std::size_t n = size / 2;
            out.samples.resize(n);
            for (std::size_t i = 0; i < n; ++i) {
                const std::int16_t raw =
                    static_cast<std::int16_t>(le16(b.data() + body + 2 * i));
                out.samples(static_cast<Index>(i)) = raw / 32768.0;
            }
            return out;
        }
        pos = body + size + (size % 2);  // chunks are word-aligned
    }
    throw FormatError(offset_msg(path + ": no data chunk", pos));
}

namespace {

ImageData load_pgm(const std::string& path, const std::vector<char>& b) {
    std::size_t pos = 2;
    auto skip_ws = [&] {
        while (pos < b.size()) {
            if (b[pos] == '#') {
                while (pos < b.size() && b[pos] != '\n') ++pos;
            } else if (std::isspace(static_cast<unsigned char>(b[pos]))) {
                ++pos;
            } else {
                break;
            }
        }
    };
    auto read_int = [&]() -> long {
        skip_ws();
        const std::size_t start = pos;
        long v = 0;
        while (pos < b.size() && std::isdigit(static_cast<unsigned char>(b[pos])))
            v = v * 10 + (b[pos++] - '0');
        if (pos == start)
            throw FormatError(offset_msg(path + ": malformed PGM header", pos));
        return v;
    };
    const long w = read_int();
    const long h = read_int();
    const long maxval = read_int();
    if (maxval != 255)
        throw FormatError(offset_msg(path + ": only 8-bit PGM supported", pos));
    ++pos;  // single whitespace after maxval
    if (pos + static_cast<std::size_t>(w) * h > b.size())
        throw FormatError(offset_msg(path + ": truncated PGM payload", pos));

    ImageData img;
    img.width = static_cast<int>(w);
    img.height = static_cast<int>(h);
    Vector raw(w * h);
    for (long i = 0; i < w * h; ++i)
        raw(i) = static_cast<double>(static_cast<std::uint8_t>(b[pos + i]));
    img.pixels = normalize_channel(raw);
    return img;
}

struct PngReader {
    png_structp png = nullptr;
    png_infop info = nullptr;
    FILE* fp = nullptr;
    ~PngReader() {
        if (png) png_destroy_read_struct(&png, info ? &info : nullptr, nullptr);
        if (fp) std::fclose(fp);
    }
};

ImageData load_png(const std::string& path) {
    PngReader r;
    r.fp = std::fopen(path.c_str(), "rb");
    if (!r.fp)
        throw IoError("cannot open " + path);
    r.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    r.info = png_create_info_struct(r.png);
    if (setjmp(png_jmpbuf(r.png)))
        throw FormatError(path + ": libpng failed to decode");
    png_init_io(r.png, r.fp);
    png_read_info(r.png, r.info);

    const png_byte color = png_get_color_type(r.png, r.info);
    const png_byte depth = png_get_bit_depth(r.png, r.info);
    if (color != PNG_COLOR_TYPE_GRAY)
        throw FormatError(path + ": unsupported encoding (PNG is not grayscale)");
    if (depth < 8) png_set_expand_gray_1_2_4_to_8(r.png);
    if (depth == 16) png_set_strip_16(r.png);
    png_read_update_info(r.png, r.info);

    const png_uint_32 w = png_get_image_width(r.png, r.info);
    const png_uint_32 h = png_get_image_height(r.png, r.info);
    std::vector<std::uint8_t> row(w);
    Vector raw(static_cast<Index>(w) * h);
    for (png_uint_32 y = 0; y < h; ++y) {
        png_read_row(r.png, row.data(), nullptr);
        for (png_uint_32 x = 0; x < w; ++x)
            raw(static_cast<Index>(y) * w + x) = static_cast<double>(row[x]);
    }

    ImageData img;
    img.width = static_cast<int>(w);
    img.height = static_cast<int>(h);
    img.pixels = normalize_channel(raw);
    return img;
}

}  // namespace

ImageData load_image_gray(const std::string& path) {
    std::vector<char> head = read_all(path);
    if (head.size() >= 2 && head[0] == 'P' && head[1] == '5')
        return load_pgm(path, head);
    static const unsigned char png_sig[4] = {0x89, 'P', 'N', 'G'};
    if (head.size() >= 4 && std::memcmp(head.data(), png_sig, 4) == 0)
        return load_png(path);
    throw FormatError(offset_msg(path + ": unsupported image format", 0));
}

void write_pgm(const std::string& path, const Matrix& pixels_0_255) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot write " + path);
    out << "P5\n" << pixels_0_255.cols() << " " << pixels_0_255.rows() << "\n255\n";
    for (Index y = 0; y < pixels_0_255.rows(); ++y)
        for (Index x = 0; x < pixels_0_255.cols(); ++x) {
            const double v = std::clamp(pixels_0_255(y, x), 0.0, 255.0);
            out.put(static_cast<char>(static_cast<std::uint8_t>(v + 0.5)));
        }
}

namespace {

struct PngWriter {
    png_structp png = nullptr;
    png_infop info = nullptr;
    FILE* fp = nullptr;
    ~PngWriter() {
        if (png) png_destroy_write_struct(&png, info ? &info : nullptr);
        if (fp) std::fclose(fp);
    }
};

}  // namespace

void write_png_gray(const std::string& path, const Matrix& pixels_0_255) {
    PngWriter w;
    w.fp = std::fopen(path.c_str(), "wb");
    if (!w.fp)
        throw IoError("cannot write " + path);
    w.png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    w.info = png_create_info_struct(w.png);
    if (setjmp(png_jmpbuf(w.png)))
        throw IoError(path + ": libpng failed to encode");
    png_init_io(w.png, w.fp);
    png_set_IHDR(w.png, w.info, static_cast<png_uint_32>(pixels_0_255.cols()),
                 static_cast<png_uint_32>(pixels_0_255.rows()), 8,
                 PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_write_info(w.png, w.info);
    std::vector<std::uint8_t> row(pixels_0_255.cols());
    for (Index y = 0; y < pixels_0_255.rows(); ++y) {
        for (Index x = 0; x < pixels_0_255.cols(); ++x) {
            const double v = std::clamp(pixels_0_255(y, x), 0.0, 255.0);
            row[static_cast<std::size_t>(x)] = static_cast<std::uint8_t>(v + 0.5);
        }
        png_write_row(w.png, row.data());
    }
    png_write_end(w.png, w.info);
}

void write_csv(const std::string& path, const SignalMatrix& signal,
               const std::vector<std::string>& channel_names) {
    std::ofstream out(path);
    if (!out)
        throw IoError("cannot write " + path);
    const Index d = signal.channels();
    for (Index i = 0; i < d; ++i) {
        if (i) out << ',';
        out << (i < static_cast<Index>(channel_names.size()) ? channel_names[i]
                                                             : "ch" + std::to_string(i));
    }
    out << '\n';
    out << std::setprecision(12);
    for (Index t = 0; t < signal.samples(); ++t) {
        for (Index i = 0; i < d; ++i) {
            if (i) out << ',';
            out << signal.data()(i, t);
        }
        out << '\n';
    }
}

CsvData read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open " + path);
    std::string line;
    if (!std::getline(in, line))
        throw FormatError(path + ": empty CSV");

    std::vector<std::string> names;
    {
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ','))
            names.push_back(cell);
    }
    const Index d = static_cast<Index>(names.size());
    std::vector<double> values;
    long rows = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        Index col = 0;
        while (std::getline(ss, cell, ',')) {
            values.push_back(std::stod(cell));
            ++col;
        }
        if (col != d)
            throw FormatError(path + ": ragged CSV row " + std::to_string(rows + 2));
        ++rows;
    }
    if (rows == 0)
        throw FormatError(path + ": CSV has no data rows");
    Matrix m(d, rows);
    for (long t = 0; t < rows; ++t)
        for (Index i = 0; i < d; ++i)
            m(i, t) = values[static_cast<std::size_t>(t) * d + i];
    return CsvData{SignalMatrix(std::move(m)), std::move(names)};
}

std::string file_hash(const std::string& path) {
    std::vector<char> b = read_all(path);
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (char c : b) {
        h ^= static_cast<std::uint8_t>(c);
        h *= 0x100000001b3ull;
    }
    std::ostringstream os;
    os << "fnv1a:" << std::hex << std::setw(16) << std::setfill('0') << h;
    return os.str();
}

}  // namespace smica
