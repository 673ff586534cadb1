#pragma once

#include <string_view>

// Default lexicons compiled in from data/. Each can be replaced at run time
// by loading a file with the same format.
namespace numsarc::resources {

std::string_view pos_lexicon();
std::string_view unit_aliases();
std::string_view positive_words();
std::string_view negative_words();
std::string_view positive_emoticons();
std::string_view negative_emoticons();

}  // namespace numsarc::resources
