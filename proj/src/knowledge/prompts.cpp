#include "codemie/knowledge/prompts.hpp"

#include "codemie/error.hpp"

#include <sstream>

namespace codemie::knowledge {

namespace {

std::string join(const std::vector<std::string>& items, const std::string& sep) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i > 0) {
            out += sep;
        }
        out += items[i];
    }
    return out;
}

} // namespace

std::string build_attribute_prompt(const std::string& text,
                                   const std::string& etype,
                                   const std::vector<std::string>& attrs,
                                   core::Language language) {
    if (attrs.empty()) {
        throw DataError("attribute prompt: type " + etype + " has no attributes");
    }
    std::ostringstream out;
    if (language == core::Language::ZH) {
        out << "根据给定的文本\"" << text << "\"，分析 " << etype << " 实体类型可能具有的属性，例如 "
            << join(attrs, "、") << "。如果文本中未提及，显示\"未提及\"。注意以下几点：\n"
            << "1. 将所有结果以 (" << join(attrs, ", ") << ") 的格式输出。\n"
            << "2. 尽可能多地输出结果。\n"
            << "3. 不要进行任何其他额外的分析。\n";
        return out.str();
    }
    out << "Based on the given text \"" << text << "\", analyze the possible attributes of the "
        << etype << " entity type, such as " << join(attrs, ", ")
        << ". If it is not mentioned in the text, display \"not mentioned\". "
        << "Note the following:\n"
        << "1. Output all results in the format (" << join(attrs, ", ") << ").\n"
        << "2. Output as many results as possible.\n"
        << "3. Do not perform any other additional analysis.\n";
    return out.str();
}

std::string build_scene_graph_prompt(core::Language language) {
    if (language == core::Language::ZH) {
        return "分析给定图像中包含的场景图。注意以下几点：\n"
               "1. 将所有结果以 (subject, object, relation) 的格式输出。\n"
               "2. 尽可能多地输出结果。\n"
               "3. 不要进行任何其他额外的分析。\n";
    }
    return "Analyze the scene graph contained in the given image. Note the following:\n"
           "1. Output all results in the format (subject, object, relation).\n"
           "2. Output as many results as possible.\n"
           "3. Do not perform any other additional analysis.\n";
}

} // namespace codemie::knowledge
