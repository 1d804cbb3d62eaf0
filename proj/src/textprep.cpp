#include "bhasha/textprep.hpp"

#include <fstream>
#include <sstream>

namespace bhasha {

namespace {

// UTF-8 encodings of U+201C and U+201D.
constexpr std::string_view kLeftDoubleQuote = "\xE2\x80\x9C";
constexpr std::string_view kRightDoubleQuote = "\xE2\x80\x9D";

}  // namespace

std::string preprocess(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  bool pending_space = false;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const char c = raw[i];
    if (c == ' ') {
      pending_space = true;
      continue;
    }
    if (pending_space && !out.empty()) out.push_back(' ');
    pending_space = false;

    if (c == '"') {
      out.push_back('\'');
    } else if (raw.substr(i, 3) == kLeftDoubleQuote || raw.substr(i, 3) == kRightDoubleQuote) {
      out.push_back('\'');
      i += 2;
    } else {
      out.push_back(c);
    }
  }
  return out;
}

std::string enumerate_options(std::span<const std::string> options) {
  if (options.size() < kMinOptions || options.size() > kMaxOptions)
    throw DataError("option count " + std::to_string(options.size()) + " outside [2, 10]");
  std::string out;
  for (std::size_t i = 0; i < options.size(); ++i) {
    if (i) out += ", ";
    out.push_back(static_cast<char>('A' + i));
    out += ") ";
    out += preprocess(options[i]);
  }
  return out;
}

std::string task_keyword(const Sample& s) {
  std::string keyword(task_name(s.task));
  if (s.task == TaskType::Translation) {
    if (s.input_fields.size() < 2 || preprocess(s.input_fields[1]).empty())
      throw TemplateError("translation sample '" + s.id + "' has no target language");
    keyword += " [" + preprocess(s.input_fields[1]) + "]";
  }
  return keyword;
}

FormattedSample format_input(const Sample& s) {
  if (s.input_fields.empty()) throw TemplateError("sample '" + s.id + "' has no input fields");

  std::string prompt = preprocess(s.input_fields[0]);
  if (s.task == TaskType::NLI) {
    if (s.input_fields.size() != 2) throw TemplateError("NLI sample '" + s.id + "' needs 2 texts");
    prompt += kSeparator;
    prompt += preprocess(s.input_fields[1]);
  } else if (s.task == TaskType::MCQ) {
    prompt += kSeparator;
    prompt += enumerate_options(s.options);
  }
  prompt += kSeparator;
  prompt += task_keyword(s);
  prompt += kPromptSuffix;

  return FormattedSample{s.id, std::move(prompt), preprocess(s.output), s.language};
}

TaskType parse_task_keyword(std::string_view prompt) {
  if (prompt.size() < kPromptSuffix.size() ||
      prompt.substr(prompt.size() - kPromptSuffix.size()) != kPromptSuffix)
    throw TemplateError("prompt does not end with the ' ### :' suffix");
  std::string_view head = prompt.substr(0, prompt.size() - kPromptSuffix.size());
  const auto sep = head.rfind(kSeparator);
  if (sep == std::string_view::npos) throw TemplateError("prompt has no keyword separator");
  std::string_view keyword = head.substr(sep + kSeparator.size());

  if (keyword.starts_with("TRANSLATION [") && keyword.ends_with("]")) return TaskType::Translation;
  for (TaskType t : all_task_types()) {
    if (t != TaskType::Translation && keyword == task_name(t)) return t;
  }
  throw TemplateError("unknown task keyword '" + std::string(keyword) + "'");
}

ChatTemplate::ChatTemplate(std::string text) : text_(std::move(text)) {
  if (auto pos = text_.find("{user}"); pos != std::string::npos) {
    slot_pos_ = pos;
    slot_len_ = 6;
  } else if (pos = text_.find("{}"); pos != std::string::npos) {
    slot_pos_ = pos;
    slot_len_ = 2;
  } else {
    throw TemplateError("chat template has no {user} placeholder");
  }
}

ChatTemplate ChatTemplate::from_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read chat template " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return ChatTemplate(buf.str());
}

std::string ChatTemplate::render(std::string_view user) const {
  std::string out;
  out.reserve(text_.size() + user.size());
  out.append(text_, 0, slot_pos_);
  out.append(user);
  out.append(text_, slot_pos_ + slot_len_);
  return out;
}

std::string render_chat(const FormattedSample& f, const ChatTemplate& tmpl) {
  return tmpl.render(f.prompt);
}

nlohmann::json to_json(const FormattedSample& f) {
  return nlohmann::json{{"id", f.id},
                        {"prompt", f.prompt},
                        {"target", f.target},
                        {"language", std::string(to_string(f.language))}};
}

FormattedSample formatted_from_json(const nlohmann::json& j) {
  try {
    return FormattedSample{j.at("id").get<std::string>(), j.at("prompt").get<std::string>(),
                           j.at("target").get<std::string>(),
                           parse_language(j.at("language").get<std::string>())};
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed formatted sample: ") + e.what());
  }
}

}  // namespace bhasha
