export { readSnapshot, parseSnapshot, cellIndex, Snapshot, SnapshotError } from "./snapshot";
export {
  schlierenImage,
  writeSchlieren,
  SchlierenSpec,
  SliceAxis,
  VizError,
  DEFAULT_K,
} from "./schlieren";
export { parseTable, readTable, panelImage, scatterOverlay, Table, OverlayResult } from "./scatter";
