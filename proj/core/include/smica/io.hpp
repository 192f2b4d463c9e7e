#pragma once

#include <string>
#include <vector>

#include "smica/signal.hpp"

namespace smica {

struct WavData {
    Vector samples;  // raw PCM mapped to [-1, 1)
    int sample_rate = 0;
};

struct ImageData {
    Vector pixels;  // row-major flatten, centered and unit variance
    int width = 0;
    int height = 0;
};

/// RIFF/WAVE, PCM 16-bit mono only. FormatError messages name the byte
/// offset of the first problem.
WavData load_wav(const std::string& path);

/// 8-bit grayscale, binary PGM (P5) or grayscale PNG.
ImageData load_image_gray(const std::string& path);

/// Binary P5 writer (test and demo fixtures).
void write_pgm(const std::string& path, const Matrix& pixels_0_255);

/// 8-bit grayscale PNG writer (test and demo fixtures).
void write_png_gray(const std::string& path, const Matrix& pixels_0_255);

/// CSV with a header row of channel names; one row per time sample, one
/// column per channel, 12 significant digits.
void write_csv(const std::string& path, const SignalMatrix& signal,
               const std::vector<std::string>& channel_names = {});

struct CsvData {
    SignalMatrix signal;
    std::vector<std::string> channel_names;
};

CsvData read_csv(const std::string& path);

/// FNV-1a over the file bytes, for provenance records.
std::string file_hash(const std::string& path);

}  // namespace smica
