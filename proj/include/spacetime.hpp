#ifndef SPACETIME_HPP_
#define SPACETIME_HPP_

#include "spacetime/binary_solver.hpp"
#include "spacetime/compromise.hpp"
#include "spacetime/continuous_lp.hpp"
#include "spacetime/dashboard.hpp"
#include "spacetime/drsa.hpp"
#include "spacetime/error.hpp"
#include "spacetime/imo_session.hpp"
#include "spacetime/instance.hpp"
#include "spacetime/io/csv.hpp"
#include "spacetime/io/instance_file.hpp"
#include "spacetime/io/session_json.hpp"
#include "spacetime/objective.hpp"
#include "spacetime/scenario.hpp"
#include "spacetime/service/api.hpp"
#include "spacetime/service/workbench.hpp"
#include "spacetime/simplex.hpp"

#endif  // SPACETIME_HPP_
