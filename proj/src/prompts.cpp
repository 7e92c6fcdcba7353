#include "llmdp/prompts.hpp"

namespace llmdp {

const std::string& alfred_predicates_text() {
  static const std::string kText = R"((define (domain alfred)
(:predicates
    (isReceptacle ?o - object) ; true if the object is a receptacle
    (atReceptacleLocation ?r - object) ; true if the robot is at the receptacle location
    (inReceptacle ?o - object ?r - object) ; true if object ?o is in receptacle ?r
    (openable ?r - object) ; true if a receptacle is openable
    (opened ?r - object) ; true if a receptacle is opened
    (isLight ?o - object) ; true if an object is light source
    (examined ?o - object ?l - object) ; whether the object has been looked at with light
    (holds ?o - object) ; object ?o is held by robot
    (isClean ?o - object) ; true if the object has been cleaned in sink
    (isHot ?o - object) ; true if the object has been heated up
    (isCool ?o - object) ; true if the object has been cooled
    (isSink ?o - object) ; true if the object is a sink
    (isMicrowave ?o - object) ; true if the object is a microwave
    (isFridge ?o - object) ; true if the object is a fridge
))
)";
  return kText;
}

const std::string& alfred_domain_text() {
  // handEmpty is an extension beyond the 14 observation predicates: it
  // enforces the single-object carry limit without conditional effects.
  // Receptacle interactions come in surface/open pairs so preconditions stay
  // plain conjunctions.
  static const std::string kText = R"((define (domain alfred)
(:predicates
    (isReceptacle ?o - object) ; true if the object is a receptacle
    (atReceptacleLocation ?r - object) ; true if the robot is at the receptacle location
    (inReceptacle ?o - object ?r - object) ; true if object ?o is in receptacle ?r
    (openable ?r - object) ; true if a receptacle is openable
    (opened ?r - object) ; true if a receptacle is opened
    (isLight ?o - object) ; true if an object is light source
    (examined ?o - object ?l - object) ; whether the object has been looked at with light
    (holds ?o - object) ; object ?o is held by robot
    (isClean ?o - object) ; true if the object has been cleaned in sink
    (isHot ?o - object) ; true if the object has been heated up
    (isCool ?o - object) ; true if the object has been cooled
    (isSink ?o - object) ; true if the object is a sink
    (isMicrowave ?o - object) ; true if the object is a microwave
    (isFridge ?o - object) ; true if the object is a fridge
    (handEmpty) ; true while the robot carries nothing
)
(:action gotoReceptacle
 :parameters (?from - object ?to - object)
 :precondition (and (atReceptacleLocation ?from) (isReceptacle ?to) (not (= ?from ?to)))
 :effect (and (atReceptacleLocation ?to) (not (atReceptacleLocation ?from)))
)
(:action openReceptacle
 :parameters (?r - object)
 :precondition (and (atReceptacleLocation ?r) (openable ?r) (not (opened ?r)))
 :effect (and (opened ?r))
)
(:action closeReceptacle
 :parameters (?r - object)
 :precondition (and (atReceptacleLocation ?r) (openable ?r) (opened ?r))
 :effect (and (not (opened ?r)))
)
(:action pickupFromSurface
 :parameters (?o - object ?r - object)
 :precondition (and (isReceptacle ?r) (not (openable ?r)) (atReceptacleLocation ?r)
                    (inReceptacle ?o ?r) (handEmpty))
 :effect (and (holds ?o) (not (inReceptacle ?o ?r)) (not (handEmpty)))
)
(:action pickupFromOpen
 :parameters (?o - object ?r - object)
 :precondition (and (isReceptacle ?r) (openable ?r) (opened ?r) (atReceptacleLocation ?r)
                    (inReceptacle ?o ?r) (handEmpty))
 :effect (and (holds ?o) (not (inReceptacle ?o ?r)) (not (handEmpty)))
)
(:action putObject
 :parameters (?o - object ?r - object)
 :precondition (and (isReceptacle ?r) (not (openable ?r)) (atReceptacleLocation ?r) (holds ?o))
 :effect (and (inReceptacle ?o ?r) (handEmpty) (not (holds ?o)))
)
(:action putObjectInOpen
 :parameters (?o - object ?r - object)
 :precondition (and (isReceptacle ?r) (openable ?r) (opened ?r) (atReceptacleLocation ?r) (holds ?o))
 :effect (and (inReceptacle ?o ?r) (handEmpty) (not (holds ?o)))
)
(:action cleanObject
 :parameters (?o - object ?s - object)
 :precondition (and (isSink ?s) (atReceptacleLocation ?s) (holds ?o))
 :effect (and (isClean ?o))
)
(:action heatObject
 :parameters (?o - object ?m - object)
 :precondition (and (isMicrowave ?m) (atReceptacleLocation ?m) (holds ?o))
 :effect (and (isHot ?o) (not (isCool ?o)))
)
(:action coolObject
 :parameters (?o - object ?f - object)
 :precondition (and (isFridge ?f) (atReceptacleLocation ?f) (holds ?o))
 :effect (and (isCool ?o) (not (isHot ?o)))
)
(:action examineObjectInLight
 :parameters (?o - object ?l - object ?r - object)
 :precondition (and (holds ?o) (isLight ?l) (inReceptacle ?l ?r) (atReceptacleLocation ?r))
 :effect (and (examined ?o ?l))
)
)
)";
  return kText;
}

const std::vector<std::pair<std::string, std::string>>& goal_few_shots() {
  static const std::vector<std::pair<std::string, std::string>> kShots = {
      {"Your task is to: put a clean plate in microwave.",
       R"((:goal
(exists (?t - plate ?r - microwave)
(and (inReceptacle ?t ?r)
(isClean ?t)
))))"},
      {"Your task is to: examine an alarmclock with the desklamp",
       R"((:goal
(exists (?t - alarmclock ?l - desklamp)
(and (examined ?t ?l) (holds ?t)
))))"},
      {"Your task is to: put two cellphone in bed",
       R"((:goal
(exists (?t1 - cellphone ?t2 - cellphone ?r - bed)
(and (inReceptacle ?t1 ?r)
(inReceptacle ?t2 ?r)
(not (= ?t1 ?t2))
))))"},
  };
  return kShots;
}

const DomainDef& alfred_domain() {
  static const DomainDef kDomain = parse_domain(alfred_domain_text());
  return kDomain;
}

}  // namespace llmdp
