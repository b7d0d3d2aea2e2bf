#pragma once

#include <filesystem>
#include <fstream>
#include <string>

namespace nlibias {

/// Output file that only appears at its final path after commit(). Uncommitted files are
/// deleted on destruction, so a failed run leaves nothing behind.
class AtomicFile {
public:
    explicit AtomicFile(std::filesystem::path path);
    AtomicFile(const AtomicFile&) = delete;
    AtomicFile& operator=(const AtomicFile&) = delete;
    ~AtomicFile();

    std::ofstream& stream() noexcept { return out_; }
    const std::filesystem::path& path() const noexcept { return path_; }

    /// Flushes and renames into place. Throws IoError.
    void commit();

private:
    std::filesystem::path path_;
    std::filesystem::path tmp_;
    std::ofstream out_;
    bool committed_ = false;
};

/// Whole file as a string. Throws IoError.
std::string read_file(const std::filesystem::path& path);

} // namespace nlibias
