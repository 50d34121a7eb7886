#pragma once

#include "triage/clinical_tests.hpp"
#include "triage/engine.hpp"
#include "triage/errors.hpp"
#include "triage/findings.hpp"
#include "triage/fuzzy.hpp"
#include "triage/history.hpp"
#include "triage/kb_format.hpp"
#include "triage/knowledge_base.hpp"
#include "triage/record.hpp"
#include "triage/rules.hpp"
#include "triage/session.hpp"
#include "triage/signs.hpp"
#include "triage/symptoms.hpp"
