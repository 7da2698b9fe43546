package org.airsonic.player.domain;

public class UserTest {
    public void testCreateUser() { // manual test
        User user = new User("Simon", "secret", "simon@example.org");
    }
    public void testConstructor() { // automated test by ChatUniTest
        User user = new User("testUser", "testPassword", "test@example.com");
    }
    public void test05() throws Throwable { // automated test by EvoSuite
        User user0 = new User("|x45e*3q4+", " [stream]", "");
    }
    public void test001() throws Throwable { // automated test by Randoop
        User user7 = new User("hi!", "", "");
    }
    public void test25() throws Throwable { // automated test by EvoSuiteC3
        User user0 = new User("Enrico Fermi", "guest", "careers@jobs.com");
    }
}
