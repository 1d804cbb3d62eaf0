#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>

#include "bhasha/corpus_model.hpp"

namespace bhasha {

struct FormattedSample {
  std::string id;
  std::string prompt;
  std::string target;
  Language language = Language::En;

  bool operator==(const FormattedSample&) const = default;
};

struct TemplateError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline constexpr std::string_view kSeparator = " ### ";
inline constexpr std::string_view kPromptSuffix = " ### :";

// Collapses runs of ASCII spaces, trims leading/trailing ASCII spaces and maps
// ASCII and typographic double quotes to an ASCII single quote. Tabs, newlines
// and all other bytes pass through untouched.
std::string preprocess(std::string_view raw);

// "A) o1, B) o2, ..." with each option preprocessed. Throws DataError unless
// 2 <= options.size() <= 10.
std::string enumerate_options(std::span<const std::string> options);

// The keyword that sits between the final two separators, e.g. "MCQ" or
// "TRANSLATION [Hindi]".
std::string task_keyword(const Sample& s);

// Throws TemplateError when a Translation sample has no target language.
FormattedSample format_input(const Sample& s);

// Recovers the task from a formatted prompt. Throws TemplateError when the
// prompt does not end with the canonical suffix or carries no known keyword.
TaskType parse_task_keyword(std::string_view prompt);

class ChatTemplate {
 public:
  // "{user}" is the canonical placeholder; "{}" is accepted as a short form.
  explicit ChatTemplate(std::string text);

  static ChatTemplate identity() { return ChatTemplate("{user}"); }
  static ChatTemplate from_file(const std::filesystem::path& path);

  std::string render(std::string_view user) const;
  const std::string& text() const { return text_; }

 private:
  std::string text_;
  std::size_t slot_pos_ = 0;
  std::size_t slot_len_ = 0;
};

std::string render_chat(const FormattedSample& f, const ChatTemplate& tmpl);

nlohmann::json to_json(const FormattedSample& f);
FormattedSample formatted_from_json(const nlohmann::json& j);

}  // namespace bhasha
