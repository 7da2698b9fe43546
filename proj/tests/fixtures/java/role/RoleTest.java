package org.openmrs;

public class RoleTest {
    void test1()  {
        Role role = new Role("xxx");
    }
    void test2()  {
        Role role = new Role("Nurse");
    }
}
