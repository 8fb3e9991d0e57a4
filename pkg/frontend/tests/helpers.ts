/** Build synthetic snapshot bytes matching the solver's on-disk format. */
export interface SnapVariable {
  name: string;
  fn: (i: number, j: number, k: number) => number;
}

export function buildSnapshotBytes(
  nx: number,
  ny: number,
  nz: number,
  variables: SnapVariable[],
  opts: { dx?: number; dy?: number; dz?: number; time?: number } = {},
): Buffer {
  const { dx = 0.1, dy = 0.1, dz = 0.1, time = 0 } = opts;
  const header =
    [
      "ctmhd-snapshot",
      "version 1",
      `nx ${nx} ny ${ny} nz ${nz}`,
      `dx ${dx} dy ${dy} dz ${dz}`,
      "origin 0.0 0.0 0.0",
      `time ${time}`,
      `variables ${variables.map((v) => v.name).join(" ")}`,
      "byteorder little",
      "end",
    ].join("\n") + "\n";
  const ncell = nx * ny * nz;
  const body = Buffer.alloc(variables.length * ncell * 8);
  variables.forEach((v, idx) => {
    let c = 0;
    for (let k = 0; k < nz; k += 1) {
      for (let j = 0; j < ny; j += 1) {
        for (let i = 0; i < nx; i += 1) {
          body.writeDoubleLE(v.fn(i, j, k), (idx * ncell + c) * 8);
          c += 1;
        }
      }
    }
  });
  return Buffer.concat([Buffer.from(header, "ascii"), body]);
}

export function grayAt(data: Buffer, width: number, x: number, y: number): number {
  return data[4 * (y * width + x)];
}
