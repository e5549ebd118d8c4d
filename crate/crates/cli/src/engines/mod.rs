//! Engine dispatch: every scenario runs exactly one of these.

pub mod bridge;
pub mod clock;
pub mod evolve;
pub mod geometry;
pub mod phase;
pub mod relstate;

use crate::output::EngineOutcome;
use crate::scenario::Scenario;

pub fn run(scenario: &Scenario) -> Result<EngineOutcome, String> {
    scenario.validate()?;
    match scenario.engine {
        crate::scenario::EngineKind::Relstate => {
            relstate::run(scenario.relstate.as_ref().unwrap(), scenario.seed)
        }
        crate::scenario::EngineKind::Geometry => {
            geometry::run(scenario.geometry.as_ref().unwrap())
        }
        crate::scenario::EngineKind::Evolve => {
            evolve::run(scenario.evolve.as_ref().unwrap())
        }
        crate::scenario::EngineKind::Bridge => {
            bridge::run(scenario.bridge.as_ref().unwrap())
        }
        crate::scenario::EngineKind::Phase => {
            phase::run(scenario.phase.as_ref().unwrap(), scenario.seed)
        }
        crate::scenario::EngineKind::Clock => {
            clock::run(scenario.clock.as_ref().unwrap())
        }
    }
}
