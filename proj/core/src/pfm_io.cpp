#include "pssr/pfm_io.hpp"

#include <cmath>
#include <cstdio>
#include <memory>
#include <stdexcept>
#include <vector>

namespace pssr {

namespace {

struct FileCloser
{
    void operator()(FILE* f) const
    {
        if (f) fclose(f);
    }
};
using FilePtr = std::unique_ptr<FILE, FileCloser>;

void write_header(FILE* f, const char* magic, int w, int h)
{
    // Negative scale marks little-endian data.
    fprintf(f, "%s\n%d %d\n-1.0\n", magic, w, h);
}

void read_header(FILE* f, const std::string& path, std::string& magic, int& w, int& h)
{
    char m[3] = {0};
    float scale = 0.f;
    if (fscanf(f, "%2s %d %d %f", m, &w, &h, &scale) != 4)
        throw std::runtime_error("PFM header parse failed: " + path);
    if (fgetc(f) == EOF)
        throw std::runtime_error("PFM truncated: " + path);
    magic = m;
    if (magic != "Pf" && magic != "PF")
        throw std::runtime_error("not a PFM file: " + path);
    if (scale >= 0.f)
        throw std::runtime_error("big-endian PFM unsupported: " + path);
    if (w < 1 || h < 1)
        throw std::runtime_error("bad PFM size: " + path);
}

}  // namespace

void write_pfm(const std::string& path, const ScalarGrid& g)
{
    FilePtr f(fopen(path.c_str(), "wb"));
    if (!f)
        throw std::runtime_error("cannot open for writing: " + path);
    write_header(f.get(), "Pf", g.width(), g.height());
    std::vector<float> row(g.width());
    for (int y = g.height() - 1; y >= 0; --y) {
        for (int x = 0; x < g.width(); ++x)
            row[x] = static_cast<float>(g(x, y));
        if (fwrite(row.data(), sizeof(float), row.size(), f.get()) != row.size())
            throw std::runtime_error("short write: " + path);
    }
}

void write_pfm(const std::string& path, const ColorGrid& g)
{
    FilePtr f(fopen(path.c_str(), "wb"));
    if (!f)
        throw std::runtime_error("cannot open for writing: " + path);
    write_header(f.get(), "PF", g.width(), g.height());
    std::vector<float> row(static_cast<size_t>(g.width()) * 3);
    for (int y = g.height() - 1; y >= 0; --y) {
        for (int x = 0; x < g.width(); ++x)
            for (int c = 0; c < 3; ++c)
                row[3 * x + c] = static_cast<float>(g(x, y)[c]);
        if (fwrite(row.data(), sizeof(float), row.size(), f.get()) != row.size())
            throw std::runtime_error("short write: " + path);
    }
}

ScalarGrid read_pfm_scalar(const std::string& path)
{
    FilePtr f(fopen(path.c_str(), "rb"));
    if (!f)
        throw std::runtime_error("cannot open: " + path);
    std::string magic;
    int w, h;
    read_header(f.get(), path, magic, w, h);
    if (magic != "Pf")
        throw std::runtime_error("expected grayscale PFM: " + path);
    ScalarGrid g(w, h, 0.0);
    std::vector<float> row(w);
    for (int y = h - 1; y >= 0; --y) {
        if (fread(row.data(), sizeof(float), row.size(), f.get()) != row.size())
            throw std::runtime_error("short read: " + path);
        for (int x = 0; x < w; ++x) {
            if (std::isfinite(row[x]))
                g(x, y) = row[x];
            else
                g.invalidate(x, y);
        }
    }
    return g;
}

ColorGrid read_pfm_color(const std::string& path)
{
    FilePtr f(fopen(path.c_str(), "rb"));
    if (!f)
        throw std::runtime_error("cannot open: " + path);
    std::string magic;
    int w, h;
    read_header(f.get(), path, magic, w, h);
    if (magic != "PF")
        throw std::runtime_error("expected color PFM: " + path);
    ColorGrid g(w, h);
    std::vector<float> row(static_cast<size_t>(w) * 3);
    for (int y = h - 1; y >= 0; --y) {
        if (fread(row.data(), sizeof(float), row.size(), f.get()) != row.size())
            throw std::runtime_error("short read: " + path);
        for (int x = 0; x < w; ++x) {
            const Rgb v = {row[3 * x], row[3 * x + 1], row[3 * x + 2]};
            if (std::isfinite(v[0]) && std::isfinite(v[1]) && std::isfinite(v[2]))
                g(x, y) = v;
            else
                g.invalidate(x, y);
        }
    }
    return g;
}

}  // namespace pssr
