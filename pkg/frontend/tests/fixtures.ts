/** Shared fixtures for the unit tests: a small model description and the
 * flat configuration values the server would hand back for it. */

import type { ConfigValues, ModelInfo, StateExport } from "../src/types.js";

export const MODEL: ModelInfo = {
  name: "Shop",
  classes: [
    { name: "Person", abstract: true, parents: [], attributes: [{ name: "age", type: "Integer" }] },
    {
      name: "Customer", abstract: false, parents: ["Person"],
      attributes: [{ name: "age", type: "Integer" }, { name: "name", type: "String" }],
    },
    { name: "Order", abstract: false, parents: [], attributes: [] },
  ],
  associations: [
    {
      name: "Places",
      ends: [
        { class: "Customer", role: "customer", multiplicity: "1..1" },
        { class: "Order", role: "orders", multiplicity: "0..*" },
      ],
    },
  ],
  invariants: [
    { name: "Customer::adult", expression: "self.age >= 18" },
    { name: "Order::placed", expression: "self.customer->notEmpty()" },
  ],
};

export const VALUES: ConfigValues = {
  "Integer_min": "-10",
  "Integer_max": "10",
  "String_count": "5",
  "bitwidth": "8",
  "default_upper": "10",
  "Customer_min": "1",
  "Customer_max": "2",
  "Order_min": "0",
  "Order_max": "3",
  "Places_min": "0",
  "Places_max": "*",
  "Customer_age_min": "0",
  "Customer_age_max": "90",
  "inv::Customer::adult": "active",
  "inv::Order::placed": "negated",
};

export const STATE: StateExport = {
  objects: [
    { name: "customer1", class: "Customer", attrs: { age: 21, name: "ann" } },
    { name: "order1", class: "Order", attrs: {} },
    { name: "order2", class: "Order", attrs: {} },
  ],
  links: [
    { assoc: "Places", ends: ["customer1", "order1"] },
    { assoc: "Places", ends: ["customer1", "order2"] },
  ],
};
