#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "scver/diag.hpp"

namespace scver {

enum class Tok {
  End,
  Ident,
  Int,
  // keywords
  KwModule, KwInstance, KwBind, KwIn, KwOut, KwSignal, KwVar, KwEvent, KwProcess,
  KwIf, KwElse, KwWhile, KwWait, KwNotify, KwAssert, KwSkip,
  KwTime, KwChange, KwDelta, KwLtl, KwInvariant, KwTrue, KwFalse,
  KwBool, KwInt, KwEnum,
  // punctuation and operators
  LBrace, RBrace, LParen, RParen, LBracket, RBracket,
  Semi, Colon, Comma, Dot, DotDot, Arrow,
  Assign, Le, Lt, Ge, Gt, EqEq, Ne, Not, AndAnd, OrOr, Plus, Minus, Star,
};

const char* tok_text(Tok t);

struct Token {
  Tok kind = Tok::End;
  std::string text;       // identifier spelling
  std::int64_t value = 0; // integer literals
  SourceLoc loc;
};

// Tokenizes a whole buffer up front. Throws Error(Parse) on illegal input.
std::vector<Token> lex(std::string_view source);

}  // namespace scver
