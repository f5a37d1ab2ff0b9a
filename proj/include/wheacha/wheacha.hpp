#pragma once

// Umbrella header.

#include "wheacha/algebra.hpp"
#include "wheacha/analysis.hpp"
#include "wheacha/ast.hpp"
#include "wheacha/augment.hpp"
#include "wheacha/dd.hpp"
#include "wheacha/errors.hpp"
#include "wheacha/explain.hpp"
#include "wheacha/model.hpp"
#include "wheacha/mutate.hpp"
#include "wheacha/oracle.hpp"
#include "wheacha/parser.hpp"
#include "wheacha/program.hpp"
#include "wheacha/protocol.hpp"
#include "wheacha/reduce.hpp"
#include "wheacha/report.hpp"
#include "wheacha/serializer.hpp"
#include "wheacha/terminals.hpp"
#include "wheacha/token.hpp"
#include "wheacha/verify.hpp"
