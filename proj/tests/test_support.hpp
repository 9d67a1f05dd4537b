#ifndef RSLAB_TEST_SUPPORT_HPP
#define RSLAB_TEST_SUPPORT_HPP

#include <cstdlib>
#include <filesystem>
#include <string>

#include "rslab/hecke.hpp"

namespace testsupport {

inline std::filesystem::path cache_dir()
{
    char const * env = std::getenv("RSLAB_TEST_CACHE");
    return env ? std::filesystem::path(env) : std::filesystem::temp_directory_path() / "rslab_test_cache";
}

inline rslab::CurveSpec curve(std::string const & label)
{
    return rslab::CurveSpec::load(std::filesystem::path(RSLAB_TEST_DATA) / (label + ".json"));
}

} // namespace testsupport

#endif
