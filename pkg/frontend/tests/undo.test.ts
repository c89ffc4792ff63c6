import { describe, expect, it } from "vitest";

import { designDocumentSchema } from "../src/document.js";
import { initialState, reduce, serializeDocument } from "../src/state.js";
import type { Action, EditorState } from "../src/state.js";
import { mulberry32, randomAction } from "./actions.js";

function docJson(state: EditorState): string {
  return JSON.stringify(serializeDocument(state.doc));
}

describe("undo/redo over random action sequences", () => {
  it("holds across 1000 sequences", () => {
    for (let seed = 0; seed < 1000; seed++) {
      const rand = mulberry32(seed);
      const initial = initialState(64, 64);
      const initialJson = docJson(initial);
      const log: Action[] = [];
      let state = initial;

      const steps = 5 + Math.floor(rand() * 20);
      for (let i = 0; i < steps; i++) {
        const action = randomAction(rand, state);
        log.push(action);
        const before = state;
        state = reduce(state, action);

        // undo and redo are strict inverses at every point
        if (state.past.length > 0) {
          const undone = reduce(state, { type: "undo" });
          const redone = reduce(undone, { type: "redo" });
          expect(docJson(redone)).toBe(docJson(state));
          expect(redone.past.length).toBe(state.past.length);
          expect(redone.future.length).toBe(state.future.length);
        }

        // a refused action must leave the document untouched
        if (state.notice !== null && action.type !== "undo" && action.type !== "redo") {
          if (state.past.length === before.past.length) {
            expect(docJson(state)).toBe(docJson(before));
          }
        }
      }

      // undoing everything recovers the initial document
      let bottom = state;
      while (bottom.past.length > 0) bottom = reduce(bottom, { type: "undo" });
      expect(docJson(bottom)).toBe(initialJson);

      // full undo then full redo reaches the same history tip as redoing
      // straight from the final state: no history entry is lost either way
      let tip = state;
      while (tip.future.length > 0) tip = reduce(tip, { type: "redo" });
      let top = bottom;
      while (top.future.length > 0) top = reduce(top, { type: "redo" });
      expect(docJson(top)).toBe(docJson(tip));
      expect(top.past.length).toBe(tip.past.length);

      // the reducer is a pure function of the action log
      const replayed = log.reduce(reduce, initialState(64, 64));
      expect(docJson(replayed)).toBe(docJson(state));

      // every sequence ends (and therefore passed through) schema-valid
      expect(() => designDocumentSchema.parse(serializeDocument(state.doc))).not.toThrow();
    }
  });

  it("keeps every intermediate state schema-valid", () => {
    // denser check on fewer sequences: validate after every single action
    for (let seed = 0; seed < 100; seed++) {
      const rand = mulberry32(31337 + seed);
      let state = initialState(48, 48);
      for (let i = 0; i < 12; i++) {
        state = reduce(state, randomAction(rand, state));
        const parsed = designDocumentSchema.safeParse(serializeDocument(state.doc));
        expect(parsed.success, `seed ${seed} step ${i}`).toBe(true);
      }
    }
  });

  it("a new edit after undo drops the redo branch", () => {
    let s = initialState(64, 64);
    s = reduce(s, { type: "draw", path: [[1, 1], [5, 5]] });
    s = reduce(s, { type: "draw", path: [[2, 2], [6, 6]] });
    s = reduce(s, { type: "undo" });
    expect(s.future).toHaveLength(1);
    s = reduce(s, { type: "draw", path: [[3, 3], [7, 7]] });
    expect(s.future).toHaveLength(0);
    expect(reduce(s, { type: "redo" }).notice).toMatch(/nothing to redo/);
  });
});
