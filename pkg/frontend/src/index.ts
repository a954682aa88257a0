export { EngineClient, EngineError, type CreateSessionOptions } from "./api.js";
export { SessionApp, type AppOptions } from "./app.js";
export { FallbackActuator } from "./fallback.js";
export { GamepadActuator, findRumblePad } from "./gamepad.js";
export {
  compilePlan,
  PlaybackScheduler,
  type Actuator,
  type ActuatorCommand,
  type PlaybackOutcome,
  type PlaybackPlan,
} from "./playback.js";
export * from "./types.js";
export { createAdjustmentView } from "./views/adjustment.js";
export { createComparisonView } from "./views/comparison.js";
export { createCompleteView } from "./views/complete.js";
export { createValidationView } from "./views/validation.js";
