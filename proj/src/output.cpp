#include "percond/output.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "percond/errors.hpp"

namespace percond {

void atomic_write_text(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw numeric_error("cannot open " + tmp.string() + " for writing");
        out << content;
        if (!out) throw numeric_error("write failure on " + tmp.string());
    }
    fs::rename(tmp, target);
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace percond
