#include "proposalbench/io.hpp"

#include <atomic>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "proposalbench/errors.hpp"

namespace proposalbench {

namespace fs = std::filesystem;

void atomic_write(const fs::path& path, const std::function<void(std::ostream&)>& writer) {
    static std::atomic<unsigned> counter{0};
    fs::path tmp = path;
    tmp += ".tmp." + std::to_string(::getpid()) + "." + std::to_string(counter++);
    try {
        {
            std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
            if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
            writer(out);
            out.flush();
            if (!out) throw IoError("write failed for " + path.string());
        }
        std::error_code ec;
        fs::rename(tmp, path, ec);
        if (ec) throw IoError("cannot rename into " + path.string() + ": " + ec.message());
    } catch (...) {
        std::error_code ignored;
        fs::remove(tmp, ignored);
        throw;
    }
}

std::string read_text_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw IoError("read failed for " + path.string());
    return ss.str();
}

}  // namespace proposalbench
