#include "scver/lexer.hpp"

#include <cctype>
#include <unordered_map>

namespace scver {

const char* tok_text(Tok t) {
  switch (t) {
    case Tok::End: return "end of input";
    case Tok::Ident: return "identifier";
    case Tok::Int: return "integer";
    case Tok::KwModule: return "'module'";
    case Tok::KwInstance: return "'instance'";
    case Tok::KwBind: return "'bind'";
    case Tok::KwIn: return "'in'";
    case Tok::KwOut: return "'out'";
    case Tok::KwSignal: return "'signal'";
    case Tok::KwVar: return "'var'";
    case Tok::KwEvent: return "'event'";
    case Tok::KwProcess: return "'process'";
    case Tok::KwIf: return "'if'";
    case Tok::KwElse: return "'else'";
    case Tok::KwWhile: return "'while'";
    case Tok::KwWait: return "'wait'";
    case Tok::KwNotify: return "'notify'";
    case Tok::KwAssert: return "'assert'";
    case Tok::KwSkip: return "'skip'";
    case Tok::KwTime: return "'time'";
    case Tok::KwChange: return "'change'";
    case Tok::KwDelta: return "'delta'";
    case Tok::KwLtl: return "'ltl'";
    case Tok::KwInvariant: return "'invariant'";
    case Tok::KwTrue: return "'true'";
    case Tok::KwFalse: return "'false'";
    case Tok::KwBool: return "'bool'";
    case Tok::KwInt: return "'int'";
    case Tok::KwEnum: return "'enum'";
    case Tok::LBrace: return "'{'";
    case Tok::RBrace: return "'}'";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::LBracket: return "'['";
    case Tok::RBracket: return "']'";
    case Tok::Semi: return "';'";
    case Tok::Colon: return "':'";
    case Tok::Comma: return "','";
    case Tok::Dot: return "'.'";
    case Tok::DotDot: return "'..'";
    case Tok::Arrow: return "'->'";
    case Tok::Assign: return "'='";
    case Tok::Le: return "'<='";
    case Tok::Lt: return "'<'";
    case Tok::Ge: return "'>='";
    case Tok::Gt: return "'>'";
    case Tok::EqEq: return "'=='";
    case Tok::Ne: return "'!='";
    case Tok::Not: return "'!'";
    case Tok::AndAnd: return "'&&'";
    case Tok::OrOr: return "'||'";
    case Tok::Plus: return "'+'";
    case Tok::Minus: return "'-'";
    case Tok::Star: return "'*'";
  }
  return "?";
}

namespace {

const std::unordered_map<std::string_view, Tok>& keyword_map() {
  static const std::unordered_map<std::string_view, Tok> m = {
      {"module", Tok::KwModule},   {"instance", Tok::KwInstance},
      {"bind", Tok::KwBind},       {"in", Tok::KwIn},
      {"out", Tok::KwOut},         {"signal", Tok::KwSignal},
      {"var", Tok::KwVar},         {"event", Tok::KwEvent},
      {"process", Tok::KwProcess}, {"if", Tok::KwIf},
      {"else", Tok::KwElse},       {"while", Tok::KwWhile},
      {"wait", Tok::KwWait},       {"notify", Tok::KwNotify},
      {"assert", Tok::KwAssert},   {"skip", Tok::KwSkip},
      {"time", Tok::KwTime},       {"change", Tok::KwChange},
      {"delta", Tok::KwDelta},     {"ltl", Tok::KwLtl},
      {"invariant", Tok::KwInvariant}, {"true", Tok::KwTrue},
      {"false", Tok::KwFalse},     {"bool", Tok::KwBool},
      {"int", Tok::KwInt},         {"enum", Tok::KwEnum},
  };
  return m;
}

}  // namespace

std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto loc = [&] { return SourceLoc{line, col}; };
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++i;
    }
  };
  auto push = [&](Tok t, SourceLoc l) { out.push_back({t, {}, 0, l}); };

  while (i < src.size()) {
    char c = src[i];
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      advance(1);
      continue;
    }
    if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    SourceLoc l = loc();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = i;
      while (i < src.size() &&
             (std::isalnum(static_cast<unsigned char>(src[i])) || src[i] == '_')) {
        advance(1);
      }
      std::string_view word = src.substr(start, i - start);
      auto it = keyword_map().find(word);
      if (it != keyword_map().end()) {
        push(it->second, l);
      } else {
        out.push_back({Tok::Ident, std::string(word), 0, l});
      }
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::int64_t v = 0;
      while (i < src.size() && std::isdigit(static_cast<unsigned char>(src[i]))) {
        v = v * 10 + (src[i] - '0');
        if (v > (1ll << 40)) fail_parse("integer literal too large", l);
        advance(1);
      }
      out.push_back({Tok::Int, {}, v, l});
      continue;
    }
    auto two = [&](char a, char b) {
      return c == a && i + 1 < src.size() && src[i + 1] == b;
    };
    if (two('-', '>')) { push(Tok::Arrow, l); advance(2); continue; }
    if (two('.', '.')) { push(Tok::DotDot, l); advance(2); continue; }
    if (two('=', '=')) { push(Tok::EqEq, l); advance(2); continue; }
    if (two('!', '=')) { push(Tok::Ne, l); advance(2); continue; }
    if (two('<', '=')) { push(Tok::Le, l); advance(2); continue; }
    if (two('>', '=')) { push(Tok::Ge, l); advance(2); continue; }
    if (two('&', '&')) { push(Tok::AndAnd, l); advance(2); continue; }
    if (two('|', '|')) { push(Tok::OrOr, l); advance(2); continue; }
    switch (c) {
      case '{': push(Tok::LBrace, l); break;
      case '}': push(Tok::RBrace, l); break;
      case '(': push(Tok::LParen, l); break;
      case ')': push(Tok::RParen, l); break;
      case '[': push(Tok::LBracket, l); break;
      case ']': push(Tok::RBracket, l); break;
      case ';': push(Tok::Semi, l); break;
      case ':': push(Tok::Colon, l); break;
      case ',': push(Tok::Comma, l); break;
      case '.': push(Tok::Dot, l); break;
      case '=': push(Tok::Assign, l); break;
      case '<': push(Tok::Lt, l); break;
      case '>': push(Tok::Gt, l); break;
      case '!': push(Tok::Not, l); break;
      case '+': push(Tok::Plus, l); break;
      case '-': push(Tok::Minus, l); break;
      case '*': push(Tok::Star, l); break;
      default:
        fail_parse(std::string("illegal character '") + c + "'", l);
    }
    advance(1);
  }
  out.push_back({Tok::End, {}, 0, loc()});
  return out;
}

}  // namespace scver
