#ifndef UTA_UTA_HPP
#define UTA_UTA_HPP

#include "uta/analysis.hpp"
#include "uta/conversions.hpp"
#include "uta/document.hpp"
#include "uta/error.hpp"
#include "uta/string_automata.hpp"
#include "uta/tree_automaton.hpp"
#include "uta/trees.hpp"
#include "uta/witnesses.hpp"

#endif  // UTA_UTA_HPP
