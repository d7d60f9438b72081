/**
 * IDX-format digit datasets (the MNIST file layout).
 *
 * Images load from `*-images-idx3-ubyte` / labels from `*-labels-idx1-ubyte`
 * (optionally gzipped). Pixels normalize to [0, 1], images resize
 * bilinearly to the manifest's target size and grayscale replicates to
 * three channels so the same architectures run unchanged. Nothing is ever
 * downloaded: the data root must already hold the files.
 */

import { existsSync, readFileSync } from 'fs'
import { join } from 'path'
import { gunzipSync } from 'zlib'

const IMAGES_MAGIC = 2051
const LABELS_MAGIC = 2049

export interface DigitDataset {
  /** count x rows x cols, row-major, values in [0, 1] */
  images: Float32Array
  labels: Uint8Array
  count: number
  rows: number
  cols: number
}

/** Deterministic 32-bit PRNG (mulberry32); good enough for shuffles. */
export function rng(seed: number): () => number {
  let state = seed >>> 0
  return () => {
    state = (state + 0x6d2b79f5) >>> 0
    let t = state
    t = Math.imul(t ^ (t >>> 15), t | 1)
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61)
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296
  }
}

function readMaybeGzipped(path: string): Buffer {
  if (existsSync(path)) return readFileSync(path)
  if (existsSync(`${path}.gz`)) return gunzipSync(readFileSync(`${path}.gz`))
  throw new Error(`dataset file not found: ${path}[.gz]`)
}

export function loadIdxImages(path: string): { data: Uint8Array; count: number; rows: number; cols: number } {
  const buffer = readMaybeGzipped(path)
  if (buffer.length < 16) throw new Error(`${path}: truncated IDX image header`)
  const magic = buffer.readUInt32BE(0)
  if (magic !== IMAGES_MAGIC) throw new Error(`${path}: bad magic ${magic}, expected ${IMAGES_MAGIC}`)
  const count = buffer.readUInt32BE(4)
  const rows = buffer.readUInt32BE(8)
  const cols = buffer.readUInt32BE(12)
  const expected = 16 + count * rows * cols
  if (buffer.length < expected) {
    throw new Error(`${path}: expected ${expected} bytes, got ${buffer.length}`)
  }
  return { data: new Uint8Array(buffer.buffer, buffer.byteOffset + 16, count * rows * cols), count, rows, cols }
}

export function loadIdxLabels(path: string): Uint8Array {
  const buffer = readMaybeGzipped(path)
  if (buffer.length < 8) throw new Error(`${path}: truncated IDX label header`)
  const magic = buffer.readUInt32BE(0)
  if (magic !== LABELS_MAGIC) throw new Error(`${path}: bad magic ${magic}, expected ${LABELS_MAGIC}`)
  const count = buffer.readUInt32BE(4)
  if (buffer.length < 8 + count) throw new Error(`${path}: truncated label payload`)
  return new Uint8Array(buffer.buffer, buffer.byteOffset + 8, count)
}

export function loadIdxPair(imagesPath: string, labelsPath: string): DigitDataset {
  const images = loadIdxImages(imagesPath)
  const labels = loadIdxLabels(labelsPath)
  if (labels.length !== images.count) {
    throw new Error(`${imagesPath}: ${images.count} images but ${labels.length} labels`)
  }
  const normalized = new Float32Array(images.data.length)
  for (let i = 0; i < images.data.length; i++) normalized[i] = images.data[i] / 255
  return {
    images: normalized,
    labels: new Uint8Array(labels),
    count: images.count,
    rows: images.rows,
    cols: images.cols,
  }
}

/** Standard MNIST-layout file names under a data root. */
export function loadSplit(dataRoot: string, split: 'train' | 'test'): DigitDataset {
  const prefix = split === 'train' ? 'train' : 't10k'
  return loadIdxPair(
    join(dataRoot, `${prefix}-images-idx3-ubyte`),
    join(dataRoot, `${prefix}-labels-idx1-ubyte`),
  )
}

/** Bilinear resize of every image to rows x cols. */
export function resizeDataset(ds: DigitDataset, rows: number, cols: number): DigitDataset {
  if (ds.rows === rows && ds.cols === cols) return ds
  const out = new Float32Array(ds.count * rows * cols)
  const scaleR = ds.rows / rows
  const scaleC = ds.cols / cols
  for (let n = 0; n < ds.count; n++) {
    const src = n * ds.rows * ds.cols
    const dst = n * rows * cols
    for (let r = 0; r < rows; r++) {
      const sr = Math.min((r + 0.5) * scaleR - 0.5, ds.rows - 1)
      const r0 = Math.max(Math.floor(sr), 0)
      const r1 = Math.min(r0 + 1, ds.rows - 1)
      const fr = sr - r0
      for (let c = 0; c < cols; c++) {
        const sc = Math.min((c + 0.5) * scaleC - 0.5, ds.cols - 1)
        const c0 = Math.max(Math.floor(sc), 0)
        const c1 = Math.min(c0 + 1, ds.cols - 1)
        const fc = sc - c0
        const top = ds.images[src + r0 * ds.cols + c0] * (1 - fc)
          + ds.images[src + r0 * ds.cols + c1] * fc
        const bottom = ds.images[src + r1 * ds.cols + c0] * (1 - fc)
          + ds.images[src + r1 * ds.cols + c1] * fc
        out[dst + r * cols + c] = top * (1 - fr) + bottom * fr
      }
    }
  }
  return { images: out, labels: ds.labels, count: ds.count, rows, cols }
}

/** Deterministic subset of the dataset (seeded shuffle, then truncation). */
export function subsetDataset(ds: DigitDataset, fraction: number, seed: number): DigitDataset {
  if (!(fraction > 0 && fraction <= 1)) {
    throw new Error(`subset fraction must lie in (0, 1], got ${fraction}`)
  }
  if (fraction === 1) return ds
  const keep = Math.max(1, Math.round(ds.count * fraction))
  const order = shuffledIndices(ds.count, rng(seed))
  const size = ds.rows * ds.cols
  const images = new Float32Array(keep * size)
  const labels = new Uint8Array(keep)
  for (let i = 0; i < keep; i++) {
    const source = order[i]
    images.set(ds.images.subarray(source * size, (source + 1) * size), i * size)
    labels[i] = ds.labels[source]
  }
  return { images, labels, count: keep, rows: ds.rows, cols: ds.cols }
}

export function shuffledIndices(count: number, random: () => number): Int32Array {
  const order = new Int32Array(count)
  for (let i = 0; i < count; i++) order[i] = i
  for (let i = count - 1; i > 0; i--) {
    const j = Math.floor(random() * (i + 1))
    const swap = order[i]
    order[i] = order[j]
    order[j] = swap
  }
  return order
}

/** Gather a batch as channels-replicated image data: [n, rows, cols, 3]. */
export function gatherBatch(
  ds: DigitDataset, indices: ArrayLike<number>, start: number, end: number,
): { images: Float32Array; labels: Int32Array; size: number } {
  const size = end - start
  const pixels = ds.rows * ds.cols
  const images = new Float32Array(size * pixels * 3)
  const labels = new Int32Array(size)
  for (let i = 0; i < size; i++) {
    const source = indices[start + i]
    const from = source * pixels
    const to = i * pixels * 3
    for (let p = 0; p < pixels; p++) {
      const value = ds.images[from + p]
      images[to + p * 3] = value
      images[to + p * 3 + 1] = value
      images[to + p * 3 + 2] = value
    }
    labels[i] = ds.labels[source]
  }
  return { images, labels, size }
}
